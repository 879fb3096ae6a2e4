#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace crtcover {

struct SummaryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double stderr_mean = 0.0;
    // 1%, 5%, 25%, 50%, 75%, 95%, 99% by type-7 linear interpolation.
    double quantiles[7] = {0, 0, 0, 0, 0, 0, 0};
};

inline constexpr double kSummaryQuantileLevels[7] = {0.01, 0.05, 0.25, 0.50,
                                                     0.75, 0.95, 0.99};

// Welford accumulator; mergeable so replica batches can be reduced in any
// grouping with the same result up to rounding.
struct RunningMoments {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    void merge(const RunningMoments& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double total = static_cast<double>(count + other.count);
        const double delta = other.mean - mean;
        mean += delta * static_cast<double>(other.count) / total;
        m2 += other.m2 + delta * delta * static_cast<double>(count) *
                             static_cast<double>(other.count) / total;
        count += other.count;
    }

    double variance() const {
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }
};

SummaryStats summarize(std::span<const double> samples);

// Type-7 quantile of a sorted sample.
double quantile_sorted(std::span<const double> sorted, double level);

// Two-sample Kolmogorov-Smirnov distance, sup |F_a - F_b| over the merged
// support.
double ks_distance(std::span<const double> a, std::span<const double> b);

// Least-squares slope of log P(X >= lambda * mean(X)) against lambda,
// restricted to grid points whose empirical survival count is at least 50.
// Throws if fewer than two usable grid points remain or the sample is
// degenerate (zero variance).
double survival_tail_slope(std::span<const double> samples,
                           std::span<const double> lambda_grid);

// Same fit with the per-point log-survival values exposed, for residual
// diagnostics. Returns {slope, intercept}; usable points appended to out.
struct TailFitPoint {
    double lambda = 0.0;
    double log_survival = 0.0;
};
std::pair<double, double> survival_tail_fit(std::span<const double> samples,
                                            std::span<const double> lambda_grid,
                                            std::vector<TailFitPoint>* points);

double trapezoid_integral(std::span<const double> grid,
                          std::span<const double> values);

}  // namespace crtcover
