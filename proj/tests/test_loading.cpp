#include "support.hpp"

#include <algorithm>

using namespace fatiq;
using namespace fatiq::loading;
using fatiq::test::rel_near;

namespace {

StructureConstant beam_q() {
    static const StructureConstant q = compute_Q(
        ibeam::severity_grid(ibeam::reference_geometry(), ibeam::reference_grid(), ibeam::Domain::quarter),
        test::reference_model(), 8.0);
    return q;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST(GammaFit, DeterministicAtZeroCv) {
    const auto model = gamma_fit(0.25, 0.0, 3.0);
    ASSERT_TRUE(std::holds_alternative<DeterministicConstant>(model));
    SeededRng rng(1, 0);
    EXPECT_EQ(sample_load(model, rng), 0.25);
}

TEST(GammaFit, MomentsByMonteCarlo) {
    for (double c : {0.2, 0.5, 1.0}) {
        const auto model = gamma_fit(0.25, c, 3.0);
        EXPECT_TRUE(rel_near(load_mean(model), 0.25, 1e-12));
        EXPECT_TRUE(rel_near(load_cv(model), c, 1e-10));
        SeededRng rng(77, static_cast<std::uint64_t>(c * 10));
        double sum = 0.0, sq = 0.0;
        constexpr int draws = 1000000;
        for (int i = 0; i < draws; ++i) {
            const double x = sample_load(model, rng);
            sum += x;
            sq += x * x;
        }
        const double mean = sum / draws;
        const double cv = std::sqrt(sq / draws - mean * mean) / mean;
        EXPECT_TRUE(rel_near(mean, 0.25, 0.005)) << "c=" << c;
        EXPECT_TRUE(rel_near(cv, c, 0.01)) << "c=" << c;
    }
}

TEST(GammaFit, CvDecreasingInShape) {
    double prev = 1e300;
    for (double la = std::log(gamma_shape_min); la <= std::log(gamma_shape_max); la += 0.05) {
        const double cv = gamma_alpha_cv(std::exp(la), 3.0);
        EXPECT_LT(cv, prev);
        prev = cv;
    }
}

TEST(GammaFit, RejectsUnreachableCv) {
    EXPECT_THROW(gamma_fit(0.25, -0.1, 3.0), DomainError);
    EXPECT_THROW(gamma_fit(0.25, 1e9, 3.0), DomainError);
    EXPECT_THROW(gamma_fit(-0.25, 0.5, 3.0), DomainError);
}

TEST(LoadDensity, IntegratesToOneWithFittedMean) {
    const auto g = std::get<IidGammaAlpha>(gamma_fit(0.25, 0.5, 3.0));
    double mass = 0.0, first = 0.0;
    const double dx = 1e-5;
    for (double x = dx / 2; x < 3.0; x += dx) {
        mass += load_density(g, x) * dx;
        first += x * load_density(g, x) * dx;
    }
    EXPECT_NEAR(mass, 1.0, 1e-6);
    EXPECT_NEAR(first, 0.25, 1e-6);
    EXPECT_EQ(load_density(g, -1.0), 0.0);
}

TEST(SampleLoadSums, Deterministic) {
    const std::vector<double> grid{1.0, 10.0, 1000.0};
    SeededRng rng(2, 0);
    const auto sums = sample_load_sums(DeterministicConstant{0.3}, grid, 3.0, rng);
    for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_EQ(sums[j], grid[j] * std::pow(0.3, 3.0));
}

TEST(SampleLoadSums, MeanAndAdditivity) {
    const auto model = gamma_fit(0.25, 0.5, 3.0);
    const auto& g = std::get<IidGammaAlpha>(model);
    const std::vector<double> grid{50.0};
    constexpr std::size_t reps = 10000;
    std::vector<double> block(reps), unit(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        SeededRng a(808, r), b(909, r);
        block[r] = sample_load_sums(model, grid, 3.0, a)[0];
        double s = 0.0;
        for (int i = 0; i < 50; ++i) s += std::pow(sample_load(model, b), 3.0);
        unit[r] = s;
    }
    double mean = 0.0;
    for (double x : block) mean += x / reps;
    EXPECT_TRUE(rel_near(mean, 50.0 * g.a / g.theta, 0.01));
    // 1% two-sample critical value 1.628 sqrt(2/R).
    EXPECT_LT(ks_statistic(block, unit), 1.628 * std::sqrt(2.0 / reps));
}

TEST(SampleLoadSums, RejectsBadGrid) {
    SeededRng rng(3, 0);
    const std::vector<double> grid{10.0, 5.0};
    EXPECT_THROW(sample_load_sums(gamma_fit(0.25, 0.5, 3.0), grid, 3.0, rng), DomainError);
}

TEST(McSurvival, DeterministicEqualsClosedForm) {
    const auto q = beam_q();
    const auto grid = log_spaced_grid(1e3, 1e9, 60);
    const auto res = mc_survival(q, DeterministicConstant{0.25}, {100, grid, 5});
    for (std::size_t j = 0; j < grid.size(); ++j) {
        EXPECT_EQ(res.curve[j].prob, survival_elastic_constant(q, 0.25, grid[j]));
        EXPECT_EQ(res.std_error[j], 0.0);
    }
}

TEST(McSurvival, MedianDecreasesWithCv) {
    const auto q = beam_q();
    const auto grid = log_spaced_grid(1e3, 1e9, 200);
    double prev = 1e300;
    for (double c : {0.0, 0.2, 0.5, 1.0}) {
        const auto res = mc_survival(q, gamma_fit(0.25, c, 3.0), {4000, grid, 17});
        const double median = ncf_quantile_sto(res.curve, 0.5);
        EXPECT_LT(median, prev) << "c=" << c;
        prev = median;
    }
}

TEST(McSurvival, StandardErrorScaling) {
    const auto q = beam_q();
    const auto grid = log_spaced_grid(1e4, 1e8, 40);
    const auto model = gamma_fit(0.25, 1.0, 3.0);
    const auto small = mc_survival(q, model, {1000, grid, 21});
    const auto large = mc_survival(q, model, {4000, grid, 22});
    double ratio = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (small.std_error[j] > 0.0 && small.curve[j].prob > 0.05 && small.curve[j].prob < 0.95) {
            ratio += small.std_error[j] / large.std_error[j];
            ++count;
        }
    ASSERT_GT(count, 3);
    EXPECT_NEAR(ratio / count, 2.0, 0.2);
}

TEST(McSurvival, ReproducibleAndThreadIndependent) {
    const auto q = beam_q();
    const auto grid = log_spaced_grid(1e3, 1e9, 50);
    const auto model = gamma_fit(0.25, 0.5, 3.0);
    const McConfig cfg{3000, grid, 99};
    const auto a = mc_survival(q, model, cfg);
    setenv("FATIQ_THREADS", "1", 1);
    const auto b = mc_survival(q, model, cfg);
    unsetenv("FATIQ_THREADS");
    for (std::size_t j = 0; j < grid.size(); ++j) {
        EXPECT_EQ(a.curve[j].prob, b.curve[j].prob);
        EXPECT_EQ(a.std_error[j], b.std_error[j]);
    }
}

TEST(McSurvival, RejectsBadConfig) {
    const auto q = beam_q();
    EXPECT_THROW(mc_survival(q, gamma_fit(0.25, 0.5, 3.0), {0, {1.0, 2.0}, 1}), DomainError);
    EXPECT_THROW(mc_survival(q, gamma_fit(0.25, 0.5, 3.0), {10, {}, 1}), DomainError);
    EXPECT_THROW(mc_survival(q, gamma_fit(0.25, 0.5, 3.0), {10, {3.0, 2.0}, 1}), DomainError);
}

TEST(NcfQuantileDet, Examples) {
    const auto q = beam_q();
    EXPECT_TRUE(rel_near(ncf_quantile_det(q, 0.5, 0.05), ncf_quantile_det(q, 0.25, 0.05) / 8.0, 1e-14));
    const StructureConstant unit{0.7, 1.5, 3.0};
    EXPECT_TRUE(rel_near(ncf_quantile_det(unit, 1.0, 1.0 - std::exp(-0.7)), 1.0, 1e-14));
}

TEST(NcfQuantileDet, MatchesBisection) {
    const auto q = beam_q();
    for (double p : {0.01, 0.05, 0.5, 0.9})
        for (double load : {0.15, 0.25, 0.35}) {
            double lo = 0.0, hi = 1e12;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (survival_elastic_constant(q, load, mid) > 1.0 - p ? lo : hi) = mid;
            }
            EXPECT_TRUE(rel_near(ncf_quantile_det(q, load, p), 0.5 * (lo + hi), 1e-8));
        }
}

TEST(NcfQuantileSto, DeterministicCurveAndEdges) {
    const auto q = beam_q();
    const auto grid = log_spaced_grid(1e3, 1e9, 200);
    const auto res = mc_survival(q, DeterministicConstant{0.25}, {1, grid, 0});
    const double step = std::log(grid[1] / grid[0]);
    for (double p : {0.05, 0.5})
        EXPECT_LT(std::abs(std::log(ncf_quantile_sto(res.curve, p) / ncf_quantile_det(q, 0.25, p))), step);
    EXPECT_EQ(ncf_quantile_sto(res.curve, 0.0), grid[0]);

    const auto short_grid = log_spaced_grid(1e3, 1e4, 10);
    const auto short_res = mc_survival(q, DeterministicConstant{0.25}, {1, short_grid, 0});
    try {
        ncf_quantile_sto(short_res.curve, 0.5);
        FAIL() << "expected GridTooShort";
    } catch (const GridTooShort& e) {
        EXPECT_EQ(e.last_value(), short_res.curve[9].prob);
    }
}

TEST(NcfQuantileSto, RefinementWithinInterpolationError) {
    const auto q = beam_q();
    const auto coarse = mc_survival(q, DeterministicConstant{0.25}, {1, log_spaced_grid(1e3, 1e9, 100), 0});
    const auto fine = mc_survival(q, DeterministicConstant{0.25}, {1, log_spaced_grid(1e3, 1e9, 199), 0});
    const double exact = ncf_quantile_det(q, 0.25, 0.5);
    const double e_coarse = std::abs(ncf_quantile_sto(coarse.curve, 0.5) / exact - 1.0);
    const double e_fine = std::abs(ncf_quantile_sto(fine.curve, 0.5) / exact - 1.0);
    EXPECT_LE(e_fine, e_coarse + 1e-15);
    EXPECT_LT(std::abs(ncf_quantile_sto(fine.curve, 0.5) / ncf_quantile_sto(coarse.curve, 0.5) - 1.0),
              std::log(1e6) / 99.0);
}

TEST(EquivLoad, RatioProperties) {
    const auto q = beam_q();
    const auto grid = log_spaced_grid(1e3, 1e9, 200);
    for (double p : {0.05, 0.5}) {
        double prev = 0.0;
        for (double c : {0.0, 0.2, 0.5, 1.0}) {
            const auto eq = equiv_load(q, 0.25, c, p, {4000, grid, 31});
            if (c == 0.0) {
                EXPECT_NEAR(eq.ratio, 1.0, 0.01);
            }
            EXPECT_GE(eq.ratio, prev);
            EXPECT_GE(eq.ratio, 1.0 - 0.01);
            prev = eq.ratio;
        }
    }
}
