#include "crtcover/stats.hpp"

#include <algorithm>
#include <cmath>

namespace crtcover {

double quantile_sorted(std::span<const double> sorted, double level) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    if (sorted.size() == 1) return sorted[0];
    const double pos = level * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

SummaryStats summarize(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("summarize: empty sample");
    RunningMoments moments;
    for (double x : samples) moments.add(x);

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    SummaryStats out;
    out.count = moments.count;
    out.mean = moments.mean;
    out.variance = moments.variance();
    out.stderr_mean = std::sqrt(out.variance / static_cast<double>(out.count));
    for (int i = 0; i < 7; ++i) {
        out.quantiles[i] = quantile_sorted(sorted, kSummaryQuantileLevels[i]);
    }
    return out;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t ia = 0, ib = 0;
    double sup = 0.0;
    while (ia < sa.size() && ib < sb.size()) {
        const double x = std::min(sa[ia], sb[ib]);
        while (ia < sa.size() && sa[ia] <= x) ++ia;
        while (ib < sb.size() && sb[ib] <= x) ++ib;
        sup = std::max(sup, std::fabs(static_cast<double>(ia) / na -
                                      static_cast<double>(ib) / nb));
    }
    return sup;
}

std::pair<double, double> survival_tail_fit(std::span<const double> samples,
                                            std::span<const double> lambda_grid,
                                            std::vector<TailFitPoint>* points) {
    if (samples.size() < 1000) {
        throw std::invalid_argument("survival_tail_fit: need at least 1e3 samples");
    }
    RunningMoments moments;
    for (double x : samples) moments.add(x);
    if (moments.variance() == 0.0) {
        throw std::invalid_argument("survival_tail_fit: degenerate (constant) sample");
    }
    const double mean = moments.mean;

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());

    std::vector<TailFitPoint> usable;
    for (double lambda : lambda_grid) {
        const double threshold = lambda * mean;
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), threshold);
        const auto tail_count = static_cast<std::size_t>(sorted.end() - it);
        if (tail_count < 50) continue;
        usable.push_back({lambda, std::log(static_cast<double>(tail_count) / n)});
    }
    if (usable.size() < 2) {
        throw std::invalid_argument("survival_tail_fit: insufficient tail mass");
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : usable) {
        sx += p.lambda;
        sy += p.log_survival;
        sxx += p.lambda * p.lambda;
        sxy += p.lambda * p.log_survival;
    }
    const double m = static_cast<double>(usable.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;
    if (points) *points = std::move(usable);
    return {slope, intercept};
}

double survival_tail_slope(std::span<const double> samples,
                           std::span<const double> lambda_grid) {
    return survival_tail_fit(samples, lambda_grid, nullptr).first;
}

double trapezoid_integral(std::span<const double> grid,
                          std::span<const double> values) {
    if (grid.size() != values.size()) {
        throw std::invalid_argument("trapezoid_integral: length mismatch");
    }
    if (grid.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double h = grid[i + 1] - grid[i];
        if (h <= 0.0) throw std::invalid_argument("trapezoid_integral: grid not increasing");
        total += 0.5 * h * (values[i] + values[i + 1]);
    }
    return total;
}

}  // namespace crtcover
