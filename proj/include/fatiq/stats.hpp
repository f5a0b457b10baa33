#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace fatiq::stats {

/// Nearest-rank quantile: the smallest sample x with #{samples <= x} >= p*R.
inline double quantile_nearest_rank(std::vector<double> samples, double p) {
    detail::require(!samples.empty(), "quantile of an empty sample");
    detail::require(p > 0.0 && p <= 1.0, "quantile order must lie in (0, 1]");
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(samples.size())));
    rank = std::clamp<std::size_t>(rank, 1, samples.size());
    std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(rank - 1), samples.end());
    return samples[rank - 1];
}

/// Fraction of samples strictly greater than `threshold`.
inline double fraction_above(std::span<const double> samples, double threshold) {
    if (samples.empty()) return 0.0;
    auto k = std::count_if(samples.begin(), samples.end(), [&](double s) { return s > threshold; });
    return static_cast<double>(k) / static_cast<double>(samples.size());
}

/// Two-sided normal quantile for confidence 0.99.
inline constexpr double z99 = 2.5758293035489004;

/// Half-width of the normal-approximation binomial band around a true
/// probability `prob` with `trials` draws.
inline double binomial_halfwidth(double prob, std::size_t trials, double z = z99) {
    return z * std::sqrt(prob * (1.0 - prob) / static_cast<double>(trials));
}

/// Standard normal quantile, by bisection on erfc (accurate to ~1e-12).
inline double normal_quantile(double prob) {
    detail::require(prob > 0.0 && prob < 1.0, "normal quantile needs a probability in (0, 1)");
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < prob)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Two-sided z for simultaneous coverage `confidence` over `tests` bands (Bonferroni).
inline double bonferroni_z(double confidence, std::size_t tests) {
    return normal_quantile(1.0 - (1.0 - confidence) / (2.0 * static_cast<double>(tests)));
}

/// Rank band [lo, hi] (1-based ranks) such that the sample quantile of order
/// p lies between order statistics lo and hi with the given z coverage.
struct RankBand {
    std::size_t lo;
    std::size_t hi;
};

inline RankBand quantile_rank_band(double p, std::size_t trials, double z = z99) {
    double n = static_cast<double>(trials);
    double centre = n * p;
    double half = z * std::sqrt(n * p * (1.0 - p));
    auto lo = static_cast<std::size_t>(std::max(1.0, std::floor(centre - half)));
    auto hi = static_cast<std::size_t>(std::min(n, std::ceil(centre + half)));
    return {lo, hi};
}

}  // namespace fatiq::stats
