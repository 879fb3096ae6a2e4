#include "crtcover/offspring.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crtcover {

namespace {

std::vector<double> poisson1_pmf() {
    // exp(-1)/k! until the tail is far below double noise.
    std::vector<double> pmf;
    double term = std::exp(-1.0);
    for (int k = 0; term > 1e-18 || k < 2; ++k) {
        pmf.push_back(term);
        term /= static_cast<double>(k + 1);
    }
    return pmf;
}

std::vector<double> geometric_pmf(double p) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("geometric: p outside (0,1)");
    std::vector<double> pmf;
    double term = p;
    while (term > 1e-18) {
        pmf.push_back(term);
        term *= (1.0 - p);
    }
    return pmf;
}

}  // namespace

OffspringLaw::OffspringLaw(OffspringKind kind, std::vector<double> pmf)
    : kind_(kind), pmf_(std::move(pmf)) {
    if (pmf_.empty()) throw std::invalid_argument("offspring law: empty pmf");
    double total = 0.0;
    for (double p : pmf_) {
        if (p < 0.0) throw std::invalid_argument("offspring law: negative mass");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("offspring law: pmf does not sum to 1");
    }
    for (double& p : pmf_) p /= total;

    double mean = 0.0, second = 0.0;
    for (std::size_t k = 0; k < pmf_.size(); ++k) {
        mean += static_cast<double>(k) * pmf_[k];
        second += static_cast<double>(k) * static_cast<double>(k) * pmf_[k];
    }
    mean_ = mean;
    variance_ = second - mean * mean;
    if (std::fabs(mean_ - 1.0) > 1e-12) {
        throw std::invalid_argument("offspring law: not critical (mean != 1)");
    }
    if (!(variance_ > 0.0) || !std::isfinite(variance_)) {
        throw std::invalid_argument("offspring law: variance must be positive and finite");
    }

    support_min_ = -1;
    support_gcd_ = 0;
    for (std::size_t k = 0; k < pmf_.size(); ++k) {
        if (pmf_[k] <= 0.0) continue;
        if (support_min_ < 0) {
            support_min_ = static_cast<int>(k);
        } else {
            support_gcd_ = std::gcd(support_gcd_, static_cast<int>(k) - support_min_);
        }
    }
    if (support_gcd_ == 0) support_gcd_ = 1;  // single-point support, caught below
    if (support_min_ != 0) {
        throw std::invalid_argument("offspring law: needs positive mass at 0 to terminate");
    }

    build_alias();
}

void OffspringLaw::build_alias() {
    const auto n = pmf_.size();
    alias_prob_.assign(n, 0.0);
    alias_index_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<int> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = pmf_[i] * static_cast<double>(n);
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<int>(i));
    }
    while (!small.empty() && !large.empty()) {
        const int s = small.back();
        small.pop_back();
        const int l = large.back();
        alias_prob_[s] = scaled[s];
        alias_index_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (int i : large) alias_prob_[i] = 1.0;
    for (int i : small) alias_prob_[i] = 1.0;
}

int OffspringLaw::sample(Rng& rng) const {
    const auto slot = static_cast<std::size_t>(rng.below(pmf_.size()));
    return rng.uniform() < alias_prob_[slot] ? static_cast<int>(slot)
                                             : alias_index_[slot];
}

bool OffspringLaw::supports_size(std::uint64_t n) const {
    if (n == 0) return false;
    if (n == 1) return pmf_[0] > 0.0;
    // Sum of n draws lies in support_min*n + gcd*Z; need it to reach n-1.
    const auto need = static_cast<long long>(n) - 1 -
                      static_cast<long long>(support_min_) * static_cast<long long>(n);
    if (need < 0) return false;
    return need % support_gcd_ == 0;
}

OffspringLaw OffspringLaw::poisson1() {
    return OffspringLaw(OffspringKind::Poisson1, poisson1_pmf());
}

OffspringLaw OffspringLaw::geometric(double p) {
    return OffspringLaw(OffspringKind::Geometric, geometric_pmf(p));
}

OffspringLaw OffspringLaw::binary_half() {
    return OffspringLaw(OffspringKind::BinaryHalf, {0.5, 0.0, 0.5});
}

OffspringLaw OffspringLaw::from_table(std::vector<double> pmf) {
    return OffspringLaw(OffspringKind::Table, std::move(pmf));
}

OffspringLaw OffspringLaw::from_name(const std::string& name) {
    if (name == "poisson1") return poisson1();
    if (name == "geometric-half") return geometric(0.5);
    if (name == "binary-half") return binary_half();
    throw std::invalid_argument("unknown offspring law: " + name);
}

std::string OffspringLaw::name() const {
    switch (kind_) {
        case OffspringKind::Poisson1: return "poisson1";
        case OffspringKind::Geometric: return "geometric-half";
        case OffspringKind::BinaryHalf: return "binary-half";
        case OffspringKind::Table: return "table";
    }
    return "unknown";
}

}  // namespace crtcover
