#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <fatiq.hpp>

namespace fatiq::test {

inline ::testing::AssertionResult rel_near(double actual, double expected, double tol) {
    const double err = std::abs(actual - expected) / std::max(std::abs(expected), 1e-300);
    if (err <= tol) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "actual " << actual << " expected " << expected << " relative error "
                                         << err << " > " << tol;
}

inline WeibullBasquinParams reference_params() {
    return params_from_detail(1.5, 3.0, DetailCategory(0.05, 2e6, 200.0));
}

inline SizeEffectModel reference_model() {
    const auto w = reference_params();
    return {w.m, w.alpha, w.kappa, 3e-5};
}

/// Random block sequence for property tests.
inline SeveritySequence random_sequence(std::mt19937_64& gen, std::size_t blocks = 8) {
    std::uniform_real_distribution<double> sev(50.0, 400.0);
    std::uniform_int_distribution<std::uint64_t> count(1, 200000);
    SeveritySequence seq;
    for (std::size_t i = 0; i < blocks; ++i) seq.append(sev(gen), count(gen));
    return seq;
}

}  // namespace fatiq::test
