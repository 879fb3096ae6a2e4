#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace crtcover {

// SplitMix64 step; used for seeding and key mixing only.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with inline samplers for the distributions the simulators
// need. Each replica owns one instance; streams are derived from a key
// tuple so scheduling order cannot affect results.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) {
        for (auto& word : state_) {
            word = splitmix64(seed);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in (0,1); never returns 0 so logs are safe.
    double uniform() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound), Lemire's multiply-shift rejection.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t x = (*this)();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (-bound) % bound;
            while (lo < threshold) {
                x = (*this)();
                m = static_cast<__uint128_t>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double exponential() { return -std::log(uniform()); }

    // Marsaglia polar method; the spare keeps successive draws cheap.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    // Poisson: Knuth product search for small means, Hormann's transformed
    // rejection (PTRS) otherwise.
    long long poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) {
            const double limit = std::exp(-mean);
            long long k = 0;
            double prod = uniform();
            while (prod > limit) {
                ++k;
                prod *= uniform();
            }
            return k;
        }
        const double b = 0.931 + 2.53 * std::sqrt(mean);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mean = std::log(mean);
        while (true) {
            double u = uniform() - 0.5;
            double v = uniform();
            const double us = 0.5 - std::fabs(u);
            const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) {
                return static_cast<long long>(k);
            }
            if (k < 0.0 || (us < 0.013 && v > us)) {
                continue;
            }
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                k * log_mean - mean - std::lgamma(k + 1.0)) {
                return static_cast<long long>(k);
            }
        }
    }

    // Gamma(shape, 1): Marsaglia-Tsang squeeze; boosted for shape < 1.
    double gamma(double shape) {
        if (shape <= 0.0) return 0.0;
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        while (true) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// FNV-1a over a byte view, for mixing experiment names into stream keys.
inline std::uint64_t hash_bytes(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Stream key for (master seed, experiment, n, replica). Pure function of
// the tuple: reruns and any worker count see identical streams.
inline std::uint64_t stream_key(std::uint64_t master, std::string_view experiment,
                                std::uint64_t n, std::uint64_t replica) {
    std::uint64_t s = master;
    std::uint64_t key = splitmix64(s);
    s ^= hash_bytes(experiment);
    key ^= splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ULL * (n + 1);
    key ^= splitmix64(s);
    s ^= 0xc2b2ae3d27d4eb4fULL * (replica + 1);
    key ^= splitmix64(s);
    return key;
}

inline Rng stream_for(std::uint64_t master, std::string_view experiment,
                      std::uint64_t n, std::uint64_t replica) {
    return Rng(stream_key(master, experiment, n, replica));
}

}  // namespace crtcover
