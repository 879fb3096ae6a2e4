#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crtcover/rng.hpp"

namespace crtcover {

enum class OffspringKind { Poisson1, Geometric, BinaryHalf, Table };

// Critical offspring distribution held as a truncated pmf table with an
// alias structure for O(1) draws. Criticality (mean 1, within 1e-12) and a
// finite positive variance are enforced at construction.
class OffspringLaw {
public:
    static OffspringLaw poisson1();
    static OffspringLaw geometric(double p);
    static OffspringLaw binary_half();
    static OffspringLaw from_table(std::vector<double> pmf);
    static OffspringLaw from_name(const std::string& name);

    OffspringKind kind() const { return kind_; }
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    const std::vector<double>& pmf() const { return pmf_; }

    // Support period g and residue of a single draw mod g; a total progeny
    // of n is reachable only if n-1 is a representable sum of n draws.
    bool supports_size(std::uint64_t n) const;

    int sample(Rng& rng) const;

    std::string name() const;

private:
    OffspringLaw(OffspringKind kind, std::vector<double> pmf);
    void build_alias();

    OffspringKind kind_;
    std::vector<double> pmf_;
    double mean_ = 0.0;
    double variance_ = 0.0;
    // Walker alias table.
    std::vector<double> alias_prob_;
    std::vector<int> alias_index_;
    // Lattice data: gcd of support differences and the minimal support point.
    int support_min_ = 0;
    int support_gcd_ = 1;
};

}  // namespace crtcover
