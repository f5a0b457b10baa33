#pragma once

// Weakest-link structures: size effects of the initial health, structure
// survival, the elastic constant Q, failure-point density and the Poisson
// microscopic flaw model.
//
// Normalisation: <N>(S) = kappa_ref S^-alpha and g(h) = h^m / lambda_ref.
// Only the composite g(n / <N>(S)) is observable, so other choices of the
// free constants rescale kappa_ref alone.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace fatiq {

/// Reference specimen of measure lambda_ref (m^3) characterised by (m, alpha, kappa_ref).
struct SizeEffectModel {
    double m;
    double alpha;
    double kappa_ref;
    double lambda_ref;

    SizeEffectModel(double m_, double alpha_, double kappa_ref_, double lambda_ref_)
        : m(m_), alpha(alpha_), kappa_ref(kappa_ref_), lambda_ref(lambda_ref_) {
        detail::require(std::isfinite(m) && m > 0.0, "m must be positive and finite");
        detail::require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive and finite");
        detail::require(std::isfinite(kappa_ref) && kappa_ref > 0.0, "kappa_ref must be positive and finite");
        detail::require(std::isfinite(lambda_ref) && lambda_ref > 0.0, "lambda_ref must be positive and finite");
    }
};

/// One elementary volume: its measure (m^3), unitary severity (MPa/MN) and centre.
struct Cell {
    double measure;
    double severity;
    std::array<double, 3> centre{};
};

class CellPartition {
public:
    CellPartition() = default;
    explicit CellPartition(std::vector<Cell> cells) : cells_(std::move(cells)) {
        for (const auto& c : cells_) check(c);
    }

    void push_back(const Cell& c) {
        check(c);
        cells_.push_back(c);
    }

    std::span<const Cell> cells() const noexcept { return cells_; }
    std::size_t size() const noexcept { return cells_.size(); }
    bool empty() const noexcept { return cells_.empty(); }
    const Cell& operator[](std::size_t i) const { return cells_[i]; }

    double total_measure() const {
        double v = 0.0;
        for (const auto& c : cells_) v += c.measure;
        return v;
    }

private:
    static void check(const Cell& c) {
        detail::require(std::isfinite(c.measure) && c.measure > 0.0, "cell measure must be positive");
        detail::require(std::isfinite(c.severity) && c.severity >= 0.0, "cell severity must be nonnegative");
    }
    std::vector<Cell> cells_;
};

/// Q of  Pr(N > n) = exp(-Q (sum_i P_i^alpha)^m).
struct StructureConstant {
    double q;
    double m;
    double alpha;
};

/// Per-cell probability masses of the failure point.
struct FailureDensity {
    std::vector<double> weights;
};

/// g(h) = h^m / lambda_ref, in 1/m^3.
inline double g_eval(const SizeEffectModel& model, double h) {
    detail::require(h >= 0.0, "g needs a nonnegative argument");
    return std::pow(h, model.m) / model.lambda_ref;
}

/// exp(-sum_k lambda(F_k) g(h_k)) for per-cell damage arguments h_k.
template <class G>
double survival_structure_general(const CellPartition& cells, std::span<const double> h, G&& g) {
    detail::require(h.size() == cells.size(), "one damage argument per cell is required");
    double exponent = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        detail::require(h[k] >= 0.0, "damage arguments must be nonnegative");
        exponent += cells[k].measure * g(h[k]);
    }
    return std::exp(-exponent);
}

inline double survival_structure_general(const CellPartition& cells, std::span<const double> h,
                                         const SizeEffectModel& model) {
    return survival_structure_general(cells, h, [&](double x) { return g_eval(model, x); });
}

/// Damage arguments h_k = sum_i (P_i s_k)^alpha / kappa_ref under elastic loading.
inline std::vector<double> elastic_damage_arguments(const CellPartition& cells, std::span<const double> loads,
                                                    const SizeEffectModel& model) {
    double load_sum = 0.0;
    for (double p : loads) load_sum += std::pow(p, model.alpha);
    std::vector<double> h;
    h.reserve(cells.size());
    for (const auto& c : cells.cells()) h.push_back(load_sum * std::pow(c.severity, model.alpha) / model.kappa_ref);
    return h;
}

/// Q = (1/lambda_ref) sum_k lambda(F_k) (s_k^alpha / kappa_ref)^m, midpoint rule.
/// `symmetry_factor` multiplies the cell sum when the partition covers one
/// of several congruent pieces of the structure.
inline StructureConstant compute_Q(const CellPartition& cells, const SizeEffectModel& model,
                                   double symmetry_factor = 1.0) {
    detail::require(!cells.empty(), "cannot compute Q on an empty partition");
    std::vector<double> terms(cells.size());
    auto cs = cells.cells();
    parallel_for(cs.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k)
            terms[k] = cs[k].measure * std::pow(std::pow(cs[k].severity, model.alpha) / model.kappa_ref, model.m);
    });
    double q = symmetry_factor * compensated_sum(terms) / model.lambda_ref;
    detail::require(q > 0.0 && std::isfinite(q), "Q must be positive; the severity field vanishes");
    return {q, model.m, model.alpha};
}

/// exp(-Q L^m) for a load sum L = sum_i P_i^alpha.
inline double survival_elastic_sum(const StructureConstant& q, double load_sum) {
    detail::require(load_sum >= 0.0, "load sum must be nonnegative");
    return std::exp(-q.q * std::pow(load_sum, q.m));
}

inline double survival_elastic(const StructureConstant& q, std::span<const double> loads) {
    double sum = 0.0;
    for (double p : loads) {
        detail::require(p > 0.0, "loads must be positive");
        sum += std::pow(p, q.alpha);
    }
    return survival_elastic_sum(q, sum);
}

/// Constant load P for n cycles.
inline double survival_elastic_constant(const StructureConstant& q, double load, double n) {
    detail::require(load > 0.0 && n >= 0.0, "load must be positive and n nonnegative");
    return survival_elastic_sum(q, n * std::pow(load, q.alpha));
}

/// Weight of cell k proportional to lambda(F_k) s_k^(alpha m).
inline FailureDensity failure_density(const CellPartition& cells, double m, double alpha) {
    const double k = alpha * m;
    auto cs = cells.cells();
    double smax = 0.0;
    for (const auto& c : cs) smax = std::max(smax, c.severity);
    detail::require(smax > 0.0, "failure density needs a positive severity somewhere");
    // Scaling by smax keeps s^(alpha m) in range; weights are invariant to it.
    std::vector<double> w(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) w[i] = cs[i].measure * std::pow(cs[i].severity / smax, k);
    double total = compensated_sum(w);
    for (double& x : w) x /= total;
    return {std::move(w)};
}

/// Smallest h_max with exp(-lambda(E) g(h_max)) <= tol.
inline double poisson_truncation(double total_measure, const SizeEffectModel& model, double tol = 1e-6) {
    detail::require(total_measure > 0.0 && tol > 0.0 && tol < 1.0, "invalid truncation request");
    return std::pow(-std::log(tol) * model.lambda_ref / total_measure, 1.0 / model.m) * (1.0 + 1e-12);
}

/// Sentinel health of a cell that received no flaw.
inline constexpr double no_flaw = std::numeric_limits<double>::infinity();

/// Marks a Poisson point process of flaws with intensity lambda (x) dg on
/// E x (0, h_max]; returns each cell's minimum flaw health.
inline std::vector<double> poisson_microscopic_sample(const CellPartition& cells, const SizeEffectModel& model,
                                                      double h_max, SeededRng& rng) {
    detail::require(std::exp(-cells.total_measure() * g_eval(model, h_max)) < 1e-6 * (1.0 + 1e-9),
                    "h_max too small: truncation mass exceeds 1e-6");
    const double g_max = g_eval(model, h_max);
    std::vector<double> healths(cells.size(), no_flaw);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        std::poisson_distribution<std::uint64_t> flaws(cells[k].measure * g_max);
        std::uint64_t count = flaws(rng);
        double best = no_flaw;
        // Flaw healths have CDF g(h)/g(h_max) = (h/h_max)^m on (0, h_max].
        for (std::uint64_t j = 0; j < count; ++j)
            best = std::min(best, h_max * std::pow(rng.uniform_open(), 1.0 / model.m));
        healths[k] = best;
    }
    return healths;
}

}  // namespace fatiq
