#pragma once

// Global load models for elastic structures: constant loads and i.i.d.
// loads whose alpha-th power is Gamma distributed; Monte Carlo survival,
// NCF quantiles and the deterministic equivalent load.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "specimen.hpp"
#include "structure.hpp"

namespace fatiq::loading {

struct DeterministicConstant {
    double load;  ///< MN
};

/// P^alpha ~ Gamma(shape a, rate theta).
struct IidGammaAlpha {
    double theta;
    double a;
    double alpha;
};

using LoadModel = std::variant<DeterministicConstant, IidGammaAlpha>;

struct McConfig {
    std::uint64_t replications = 10000;
    std::vector<double> n_grid;
    std::uint64_t master_seed = 0;
};

struct McSurvival {
    SurvivalCurve curve;
    std::vector<double> std_error;
};

struct EquivLoad {
    double p_eq;
    double ratio;
    double p;
    double c;
    double n_sto;
};

/// `count` log-spaced points from lo to hi inclusive.
inline std::vector<double> log_spaced_grid(double lo, double hi, std::size_t count) {
    detail::require(lo > 0.0 && hi > lo && count >= 2, "invalid log grid");
    std::vector<double> out(count);
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// Coefficient of variation of P = G^(1/alpha), G ~ Gamma(a, theta).
inline double gamma_alpha_cv(double a, double alpha) {
    const double x = std::lgamma(a + 2.0 / alpha) + std::lgamma(a) - 2.0 * std::lgamma(a + 1.0 / alpha);
    return std::sqrt(std::max(0.0, std::expm1(x)));
}

inline double gamma_alpha_mean(double theta, double a, double alpha) {
    return std::pow(theta, -1.0 / alpha) * std::exp(std::lgamma(a + 1.0 / alpha) - std::lgamma(a));
}

inline double load_mean(const LoadModel& model) {
    if (const auto* d = std::get_if<DeterministicConstant>(&model)) return d->load;
    const auto& g = std::get<IidGammaAlpha>(model);
    return gamma_alpha_mean(g.theta, g.a, g.alpha);
}

inline double load_cv(const LoadModel& model) {
    if (std::holds_alternative<DeterministicConstant>(model)) return 0.0;
    const auto& g = std::get<IidGammaAlpha>(model);
    return gamma_alpha_cv(g.a, g.alpha);
}

/// Bracket of the shape parameter searched by gamma_fit.
inline constexpr double gamma_shape_min = 1e-3;
inline constexpr double gamma_shape_max = 1e6;

/// Load law with mean `mean` and coefficient of variation `c`: a point mass
/// for c = 0, otherwise the Gamma-alpha law. The CV is strictly decreasing
/// in the shape a, which is found by bisection in log a.
inline LoadModel gamma_fit(double mean, double c, double alpha) {
    detail::require(mean > 0.0 && std::isfinite(mean), "mean load must be positive");
    detail::require(c >= 0.0 && std::isfinite(c), "coefficient of variation must be nonnegative");
    detail::require(alpha > 0.0, "alpha must be positive");
    if (c == 0.0) return DeterministicConstant{mean};
    double lo = std::log(gamma_shape_min), hi = std::log(gamma_shape_max);
    detail::require(gamma_alpha_cv(std::exp(lo), alpha) >= c && gamma_alpha_cv(std::exp(hi), alpha) <= c,
                    "coefficient of variation outside the range of the Gamma family");
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        if (gamma_alpha_cv(std::exp(mid), alpha) > c)
            lo = mid;
        else
            hi = mid;
    }
    const double a = std::exp(0.5 * (lo + hi));
    const double theta = std::pow(std::exp(std::lgamma(a + 1.0 / alpha) - std::lgamma(a)) / mean, alpha);
    return IidGammaAlpha{theta, a, alpha};
}

/// One load draw P.
inline double sample_load(const LoadModel& model, SeededRng& rng) {
    if (const auto* d = std::get_if<DeterministicConstant>(&model)) return d->load;
    const auto& g = std::get<IidGammaAlpha>(model);
    std::gamma_distribution<double> draw(g.a, 1.0 / g.theta);
    return std::pow(draw(rng), 1.0 / g.alpha);
}

/// Density of P at x (Gamma-alpha law only).
inline double load_density(const IidGammaAlpha& g, double x) {
    if (x <= 0.0) return 0.0;
    const double t = std::pow(x, g.alpha);
    const double log_gamma_pdf = g.a * std::log(g.theta) - std::lgamma(g.a) + (g.a - 1.0) * std::log(t) - g.theta * t;
    return g.alpha * std::pow(x, g.alpha - 1.0) * std::exp(log_gamma_pdf);
}

/// Cumulative sum_{i<=n} P_i^alpha at each grid n; increments over
/// (n_{j-1}, n_j] are single Gamma(shape (n_j - n_{j-1}) a, rate theta) draws.
/// `alpha` is only used by the deterministic variant.
inline std::vector<double> sample_load_sums(const LoadModel& model, std::span<const double> n_grid, double alpha,
                                            SeededRng& rng) {
    std::vector<double> sums(n_grid.size());
    if (const auto* d = std::get_if<DeterministicConstant>(&model)) {
        const double unit = std::pow(d->load, alpha);
        for (std::size_t j = 0; j < n_grid.size(); ++j) sums[j] = n_grid[j] * unit;
        return sums;
    }
    const auto& g = std::get<IidGammaAlpha>(model);
    double prev_n = 0.0, total = 0.0;
    for (std::size_t j = 0; j < n_grid.size(); ++j) {
        const double dn = n_grid[j] - prev_n;
        detail::require(dn > 0.0, "cycle grid must be strictly increasing and positive");
        std::gamma_distribution<double> draw(dn * g.a, 1.0 / g.theta);
        total += draw(rng);
        sums[j] = total;
        prev_n = n_grid[j];
    }
    return sums;
}

/// P*_{R,n} = (1/R) sum_r exp(-Q (sum_{i<=n} P_i^alpha)^m), with standard errors.
/// Replication r draws from stream r of the master seed; the average is a
/// left-to-right sum in replication order, so results do not depend on the
/// thread count.
inline McSurvival mc_survival(const StructureConstant& q, const LoadModel& model, const McConfig& cfg) {
    detail::require(cfg.replications >= 1, "at least one replication is required");
    detail::require(!cfg.n_grid.empty(), "cycle grid is empty");
    for (std::size_t j = 0; j < cfg.n_grid.size(); ++j)
        detail::require(cfg.n_grid[j] > 0.0 && (j == 0 || cfg.n_grid[j] > cfg.n_grid[j - 1]),
                        "cycle grid must be strictly increasing and positive");
    const std::size_t grid = cfg.n_grid.size();

    if (const auto* d = std::get_if<DeterministicConstant>(&model)) {
        std::vector<SurvivalCurve::Point> pts(grid);
        for (std::size_t j = 0; j < grid; ++j)
            pts[j] = {cfg.n_grid[j], survival_elastic_constant(q, d->load, cfg.n_grid[j])};
        return {SurvivalCurve(std::move(pts)), std::vector<double>(grid, 0.0)};
    }

    const std::size_t reps = cfg.replications;
    std::vector<double> values(reps * grid);
    parallel_for(reps, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            SeededRng rng(cfg.master_seed, r);
            auto sums = sample_load_sums(model, cfg.n_grid, q.alpha, rng);
            for (std::size_t j = 0; j < grid; ++j) values[r * grid + j] = survival_elastic_sum(q, sums[j]);
        }
    });

    std::vector<double> mean(grid, 0.0), sq(grid, 0.0);
    for (std::size_t r = 0; r < reps; ++r)
        for (std::size_t j = 0; j < grid; ++j) mean[j] += values[r * grid + j];
    for (double& m : mean) m /= static_cast<double>(reps);
    for (std::size_t r = 0; r < reps; ++r)
        for (std::size_t j = 0; j < grid; ++j) {
            double dv = values[r * grid + j] - mean[j];
            sq[j] += dv * dv;
        }
    std::vector<SurvivalCurve::Point> pts(grid);
    std::vector<double> se(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        pts[j] = {cfg.n_grid[j], std::min(1.0, mean[j])};
        se[j] = reps > 1 ? std::sqrt(sq[j] / static_cast<double>(reps - 1) / static_cast<double>(reps)) : 0.0;
    }
    return {SurvivalCurve(std::move(pts)), std::move(se)};
}

/// Quantile of order p of the NCF under the constant load P:
/// (-ln(1-p))^(1/m) / (Q^(1/m) P^alpha).
inline double ncf_quantile_det(const StructureConstant& q, double load, double p) {
    detail::require(load > 0.0, "load must be positive");
    detail::require(p > 0.0 && p < 1.0, "reference probability must lie in (0, 1)");
    return std::pow(-std::log1p(-p), 1.0 / q.m) / (std::pow(q.q, 1.0 / q.m) * std::pow(load, q.alpha));
}

/// First n where the curve reaches 1 - p, interpolated linearly in ln n
/// between the bracketing grid points. p = 0 returns the first grid point.
inline double ncf_quantile_sto(const SurvivalCurve& curve, double p) {
    detail::require(curve.size() > 0, "empty survival curve");
    detail::require(p >= 0.0 && p < 1.0, "reference probability must lie in [0, 1)");
    if (p == 0.0) return curve[0].n;
    const double target = 1.0 - p;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve[i].prob > target) continue;
        if (i == 0) return curve[0].n;
        const auto& a = curve[i - 1];
        const auto& b = curve[i];
        const double t = (a.prob - target) / (a.prob - b.prob);
        return std::exp(std::log(a.n) + t * (std::log(b.n) - std::log(a.n)));
    }
    throw GridTooShort("survival curve does not reach 1 - p inside the cycle grid", curve[curve.size() - 1].prob);
}

/// Equivalent load from an already estimated survival curve of the random load.
inline EquivLoad equiv_load_from_curve(const StructureConstant& q, double mean, double c, double p,
                                       const SurvivalCurve& curve) {
    detail::require(p > 0.0 && p < 1.0, "reference probability must lie in (0, 1)");
    const double n_sto = ncf_quantile_sto(curve, p);
    // Inverts ncf_quantile_det(q, P_eq, p) = n_sto.
    const double p_eq =
        std::pow(std::pow(-std::log1p(-p), 1.0 / q.m) / (std::pow(q.q, 1.0 / q.m) * n_sto), 1.0 / q.alpha);
    return {p_eq, p_eq / mean, p, c, n_sto};
}

/// Constant load with the same p-quantile NCF as the random load (mean, c).
inline EquivLoad equiv_load(const StructureConstant& q, double mean, double c, double p, const McConfig& cfg) {
    const auto mc = mc_survival(q, gamma_fit(mean, c, q.alpha), cfg);
    return equiv_load_from_curve(q, mean, c, p, mc.curve);
}

}  // namespace fatiq::loading
