#include "crtcover/gw.hpp"

#include <stdexcept>

namespace crtcover {

std::size_t cycle_lemma_rotation(const std::vector<int>& offspring) {
    long long sum = 0, min_sum = 0;
    std::size_t argmin = offspring.size() - 1;
    for (std::size_t i = 0; i < offspring.size(); ++i) {
        sum += offspring[i] - 1;
        if (sum < min_sum) {
            min_sum = sum;
            argmin = i;
        }
    }
    if (sum != -1) throw std::invalid_argument("cycle lemma: offspring sum is not n-1");
    return (argmin + 1) % offspring.size();
}

std::vector<int> rotate_offspring(const std::vector<int>& offspring, std::size_t start) {
    std::vector<int> out;
    out.reserve(offspring.size());
    out.insert(out.end(), offspring.begin() + static_cast<std::ptrdiff_t>(start),
               offspring.end());
    out.insert(out.end(), offspring.begin(),
               offspring.begin() + static_cast<std::ptrdiff_t>(start));
    return out;
}

DiscreteTree sample_conditioned_gw(const OffspringLaw& law, std::uint64_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("sample_conditioned_gw: n must be >= 1");
    if (!law.supports_size(n)) {
        throw std::domain_error("sample_conditioned_gw: size " + std::to_string(n) +
                                " has zero conditioning probability under " + law.name());
    }
    if (n == 1) return DiscreteTree::single_vertex();

    std::vector<int> offspring(n);
    const auto target = static_cast<long long>(n) - 1;
    for (std::uint64_t attempt = 0; attempt < GwSampler::kMaxAttempts; ++attempt) {
        long long total = 0;
        for (auto& x : offspring) {
            x = law.sample(rng);
            total += x;
        }
        if (total != target) continue;
        return DiscreteTree::from_offspring(
            rotate_offspring(offspring, cycle_lemma_rotation(offspring)));
    }
    throw std::runtime_error("sample_conditioned_gw: rejection budget exceeded for " +
                             law.name() + " at n=" + std::to_string(n));
}

}  // namespace crtcover
