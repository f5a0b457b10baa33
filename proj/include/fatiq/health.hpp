#pragma once

// Simulator of the additively decreasing specimen health.
//
// A specimen draws its initial health H0 from the standard Weibull law
// Pr(H0 > h) = exp(-h^m); every cycle of severity S removes 1/<N>(S). The
// specimen fails once the health reaches zero.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "specimen.hpp"

namespace fatiq {

struct HealthTrajectory {
    struct Sample {
        double n;
        double health;
    };
    double initial_health;
    std::vector<Sample> samples;
    /// Real-valued crossing of zero health; NaN when the sequence ends first.
    double failure_cycle;
};

/// Inverse-transform draw h = (-ln U)^(1/m).
inline double sample_initial_health(double m, SeededRng& rng) {
    detail::require(m > 0.0, "Weibull modulus m must be positive");
    return std::pow(-std::log(rng.uniform_open()), 1.0 / m);
}

/// NCF at constant severity: <N>(S) * H0.
inline double simulate_ncf_constant(const WeibullBasquinParams& w, double severity, SeededRng& rng) {
    double scale = scale_N(w, severity);
    return scale * sample_initial_health(w.m, rng);
}

/// First (real) cycle at which the running sum of 1/<N>(S_i) reaches `initial_health`.
inline double ncf_for_health(const WeibullBasquinParams& w, const SeveritySequence& seq, double initial_health) {
    double spent = 0.0;
    std::uint64_t before = 0;
    for (const auto& b : seq.blocks()) {
        double scale = scale_N(w, b.severity);
        double block = static_cast<double>(b.count) / scale;
        if (spent + block >= initial_health) return static_cast<double>(before) + (initial_health - spent) * scale;
        spent += block;
        before += b.count;
    }
    throw SequenceExhausted("severity sequence exhausted before failure", initial_health - spent);
}

inline double simulate_ncf_sequence(const WeibullBasquinParams& w, const SeveritySequence& seq, SeededRng& rng) {
    return ncf_for_health(w, seq, sample_initial_health(w.m, rng));
}

/// Random cumulative damage D_n = (1/H0) sum_{i<=n} 1/<N>(S_i).
inline double random_damage(const WeibullBasquinParams& w, const SeveritySequence& seq, double initial_health,
                            double n) {
    detail::require(initial_health > 0.0, "initial health must be positive");
    return scale_damage(w, seq, n) / initial_health;
}

/// Health at (at most) `max_checkpoints` evenly spaced cycles from 0 to the
/// end of the sequence.
inline HealthTrajectory health_trajectory(const WeibullBasquinParams& w, const SeveritySequence& seq,
                                          double initial_health, std::size_t max_checkpoints = 1000) {
    detail::require(initial_health > 0.0, "initial health must be positive");
    detail::require(max_checkpoints >= 2, "need at least two checkpoints");
    HealthTrajectory out{initial_health, {}, std::nan("")};
    const std::uint64_t total = seq.total_cycles();
    const std::uint64_t count = std::min<std::uint64_t>(max_checkpoints, total + 1);
    out.samples.reserve(count);

    auto blocks = seq.blocks();
    std::size_t bi = 0;
    std::uint64_t block_start = 0;
    double spent_before_block = 0.0;
    for (std::uint64_t k = 0; k < count; ++k) {
        // Integer checkpoint; the last one is the end of the sequence.
        std::uint64_t n = count == 1 ? 0 : static_cast<std::uint64_t>(
            std::llround(static_cast<double>(total) * static_cast<double>(k) / static_cast<double>(count - 1)));
        while (bi < blocks.size() && block_start + blocks[bi].count <= n) {
            spent_before_block += static_cast<double>(blocks[bi].count) / scale_N(w, blocks[bi].severity);
            block_start += blocks[bi].count;
            ++bi;
        }
        double spent = spent_before_block;
        if (bi < blocks.size()) spent += static_cast<double>(n - block_start) / scale_N(w, blocks[bi].severity);
        out.samples.push_back({static_cast<double>(n), initial_health - spent});
    }
    try {
        out.failure_cycle = ncf_for_health(w, seq, initial_health);
    } catch (const SequenceExhausted&) {
    }
    return out;
}

}  // namespace fatiq
