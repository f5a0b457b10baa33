#pragma once

// Weibull-Basquin specimen model: S-N curves, Miner damage and survival
// probabilities under constant and variable severity.
//
// Cycle counts follow the continuous relaxation: closed forms are
// real-valued in n, and sequences may be cut inside a block.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace fatiq {

/// Weibull modulus m, Basquin exponent alpha and scale constant kappa
/// (cycles * MPa^alpha) of the NCF law  Pr(N > n) = exp(-(n / (kappa S^-alpha))^m).
struct WeibullBasquinParams {
    double m;
    double alpha;
    double kappa;

    WeibullBasquinParams(double m_, double alpha_, double kappa_) : m(m_), alpha(alpha_), kappa(kappa_) {
        detail::require(std::isfinite(m) && m > 0.0, "Weibull modulus m must be positive and finite");
        detail::require(std::isfinite(alpha) && alpha > 0.0, "Basquin exponent alpha must be positive and finite");
        detail::require(std::isfinite(kappa) && kappa > 0.0, "scale constant kappa must be positive and finite");
    }
};

/// Detail category: the specimen survives N_p cycles at severity S_p with
/// probability 1 - p.
struct DetailCategory {
    double p;
    double n_p;
    double s_p;

    DetailCategory(double p_, double n_p_, double s_p_) : p(p_), n_p(n_p_), s_p(s_p_) {
        detail::require(p > 0.0 && p < 1.0, "reference probability must lie in (0, 1)");
        detail::require(std::isfinite(n_p) && n_p > 0.0, "N_p must be positive and finite");
        detail::require(std::isfinite(s_p) && s_p > 0.0, "S_p must be positive and finite");
    }
};

/// Run-length encoded cycle severities (MPa).
class SeveritySequence {
public:
    struct Block {
        double severity;
        std::uint64_t count;
    };

    SeveritySequence() = default;
    explicit SeveritySequence(std::vector<Block> blocks) {
        for (const auto& b : blocks) append(b.severity, b.count);
    }

    static SeveritySequence constant(double severity, std::uint64_t count) {
        SeveritySequence s;
        s.append(severity, count);
        return s;
    }

    SeveritySequence& append(double severity, std::uint64_t count) {
        detail::require(std::isfinite(severity) && severity > 0.0, "cycle severity must be positive");
        detail::require(count >= 1, "block cycle count must be at least 1");
        blocks_.push_back({severity, count});
        total_ += count;
        return *this;
    }

    SeveritySequence& append(const SeveritySequence& other) {
        for (const auto& b : other.blocks_) append(b.severity, b.count);
        return *this;
    }

    /// This sequence repeated `times` times.
    SeveritySequence repeated(std::uint64_t times) const {
        SeveritySequence out;
        for (std::uint64_t i = 0; i < times; ++i) out.append(*this);
        return out;
    }

    std::span<const Block> blocks() const noexcept { return blocks_; }
    std::uint64_t total_cycles() const noexcept { return total_; }
    bool empty() const noexcept { return blocks_.empty(); }

private:
    std::vector<Block> blocks_;
    std::uint64_t total_ = 0;
};

/// Monotone nonincreasing map n -> Pr(N > n) sampled on an increasing grid.
class SurvivalCurve {
public:
    struct Point {
        double n;
        double prob;
    };

    SurvivalCurve() = default;
    explicit SurvivalCurve(std::vector<Point> points) : points_(std::move(points)) {
        for (std::size_t i = 0; i < points_.size(); ++i) {
            detail::require(points_[i].prob >= 0.0 && points_[i].prob <= 1.0, "survival probability outside [0, 1]");
            if (i > 0) {
                detail::require(points_[i].n > points_[i - 1].n, "survival curve cycles must be strictly increasing");
                detail::require(points_[i].prob <= points_[i - 1].prob, "survival curve must be nonincreasing");
            }
        }
    }

    std::span<const Point> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    const Point& operator[](std::size_t i) const { return points_[i]; }

private:
    std::vector<Point> points_;
};

// ---------------------------------------------------------------------------
// Shape function u(h) = Pr(H0 > h) of the normalised initial health.

/// Evaluator pair (u, u^-1) of a shape function.
template <class T>
concept ShapeFunction = requires(const T& s, double x) {
    { s.u(x) } -> std::convertible_to<double>;
    { s.u_inv(x) } -> std::convertible_to<double>;
};

inline double shape_u(double m, double h) {
    detail::require(h >= 0.0, "normalised health must be nonnegative");
    return std::exp(-std::pow(h, m));
}

inline double shape_u_inv(double m, double q) {
    detail::require(q > 0.0 && q <= 1.0, "shape inverse needs a probability in (0, 1]");
    return std::pow(-std::log(q), 1.0 / m);
}

/// Weibull shape u(h) = exp(-h^m).
struct WeibullShape {
    double m;
    double u(double h) const { return shape_u(m, h); }
    double u_inv(double q) const { return shape_u_inv(m, q); }
};
static_assert(ShapeFunction<WeibullShape>);

// ---------------------------------------------------------------------------

inline double kappa_from_detail(double m, double alpha, const DetailCategory& d) {
    detail::require(m > 0.0 && alpha > 0.0, "m and alpha must be positive");
    double log_kappa = -std::log(-std::log1p(-d.p)) / m + std::log(d.n_p) + alpha * std::log(d.s_p);
    return detail::finite_or_throw(std::exp(log_kappa), "kappa overflows for this detail category");
}

inline WeibullBasquinParams params_from_detail(double m, double alpha, const DetailCategory& d) {
    return {m, alpha, kappa_from_detail(m, alpha, d)};
}

/// Scale of the NCF law at severity S: <N>(S) = kappa S^-alpha.
inline double scale_N(const WeibullBasquinParams& w, double severity) {
    detail::require(severity > 0.0, "severity must be positive");
    return w.kappa * std::pow(severity, -w.alpha);
}

/// Quantile of order p of the NCF at constant severity (S-N curve).
inline double sn_quantile(const WeibullBasquinParams& w, double p, double severity) {
    detail::require(p > 0.0 && p < 1.0, "reference probability must lie in (0, 1)");
    return shape_u_inv(w.m, 1.0 - p) * scale_N(w, severity);
}

/// Sum of 1/<N>(S_i) over the first n cycles (n may cut a block).
inline double scale_damage(const WeibullBasquinParams& w, const SeveritySequence& seq, double n) {
    detail::require(n >= 0.0, "cycle count must be nonnegative");
    detail::require(n <= static_cast<double>(seq.total_cycles()), "cycle count exceeds the sequence length");
    double sum = 0.0;
    double left = n;
    for (const auto& b : seq.blocks()) {
        if (left <= 0.0) break;
        double take = std::min(left, static_cast<double>(b.count));
        sum += take / scale_N(w, b.severity);
        left -= take;
    }
    return sum;
}

inline double scale_damage(const WeibullBasquinParams& w, const SeveritySequence& seq) {
    double sum = 0.0;
    for (const auto& b : seq.blocks()) sum += static_cast<double>(b.count) / scale_N(w, b.severity);
    return sum;
}

/// Miner's cumulative damage sum_i 1/N_p(S_i) over the whole sequence.
inline double miner_damage(const WeibullBasquinParams& w, double p, const SeveritySequence& seq) {
    double sum = 0.0;
    for (const auto& b : seq.blocks()) sum += static_cast<double>(b.count) / sn_quantile(w, p, b.severity);
    return sum;
}

/// Miner damage of the first n cycles.
inline double miner_damage(const WeibullBasquinParams& w, double p, const SeveritySequence& seq, double n) {
    detail::require(n >= 0.0 && n <= static_cast<double>(seq.total_cycles()),
                    "cycle count outside the sequence");
    double sum = 0.0;
    double left = n;
    for (const auto& b : seq.blocks()) {
        if (left <= 0.0) break;
        double take = std::min(left, static_cast<double>(b.count));
        sum += take / sn_quantile(w, p, b.severity);
        left -= take;
    }
    return sum;
}

/// Miner's theoretical NCF: the real crossing time of D_{p,n} = 1 and the
/// smallest integer n with D_{p,n} >= 1.
struct MinerNcf {
    double crossing;
    std::uint64_t cycles;
};

namespace detail {

// Ceiling that treats values within 1e-9 relative of an integer as that
// integer, so an exact-quantile crossing is not pushed to the next cycle.
inline double snapped_ceil(double x) {
    double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return r;
    return std::ceil(x);
}

}  // namespace detail

inline MinerNcf miner_ncf(const WeibullBasquinParams& w, double p, const SeveritySequence& seq) {
    double damage = 0.0;
    std::uint64_t before = 0;
    for (const auto& b : seq.blocks()) {
        double np = sn_quantile(w, p, b.severity);
        double block = static_cast<double>(b.count) / np;
        // A sum of blocks that reaches 1 up to rounding fails in the last block.
        if (damage + block >= 1.0 - 1e-12) {
            double inside = (1.0 - damage) * np;
            double steps = std::max(1.0, detail::snapped_ceil(inside));
            steps = std::min(steps, static_cast<double>(b.count));
            return {static_cast<double>(before) + inside, before + static_cast<std::uint64_t>(steps)};
        }
        damage += block;
        before += b.count;
    }
    throw SequenceExhausted("Miner damage never reaches 1 within the sequence", damage);
}

/// Pr(N > n) at constant severity.
inline double survival_constant(const WeibullBasquinParams& w, double severity, double n) {
    detail::require(n >= 0.0, "cycle count must be nonnegative");
    return std::exp(-std::pow(n / scale_N(w, severity), w.m));
}

/// Pr(N > n) = exp(-(sum_{i<=n} 1/<N>(S_i))^m) for a variable sequence.
inline double survival_variable(const WeibullBasquinParams& w, const SeveritySequence& seq, double n) {
    return std::exp(-std::pow(scale_damage(w, seq, n), w.m));
}

/// Pr(N > n) = (1 - p)^(D^m), evaluated as exp(D^m ln(1 - p)).
inline double survival_from_damage(double m, double p, double damage) {
    detail::require(damage >= 0.0, "damage must be nonnegative");
    detail::require(p > 0.0 && p < 1.0, "reference probability must lie in (0, 1)");
    return std::exp(std::pow(damage, m) * std::log1p(-p));
}

/// Pr(N > n) = u(u^-1(1 - p) * D) for an arbitrary shape function.
template <ShapeFunction Shape>
double survival_from_damage(const Shape& shape, double p, double damage) {
    detail::require(damage >= 0.0, "damage must be nonnegative");
    return shape.u(shape.u_inv(1.0 - p) * damage);
}

}  // namespace fatiq
