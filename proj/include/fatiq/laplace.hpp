#pragma once

// Laplace approximation of the quarter-beam integral
//   I'(k) = int_{E'} s^u(x, y, z)^k dx dy dz,   E' = {0<=x<=L/2, 0<=y<=h/2, 0<=z<=half width(y)}
// from the two hot points of the I-beam severity field: the support corner
// (0, 0, 0) and the top-fibre point (x2, h/2, 0).

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ibeam.hpp"

namespace fatiq::laplace {

/// Phi1(u) = int_0^u e^-v dv.
inline double phi1(double u) {
    fatiq::detail::require(u >= 0.0, "Phi1 needs u >= 0");
    return -std::expm1(-u);
}

/// Phi2(u) = int_0^u e^(-v^2/2) dv = sqrt(pi/2) erf(u / sqrt 2).
inline double phi2(double u) {
    fatiq::detail::require(u >= 0.0, "Phi2 needs u >= 0");
    return std::sqrt(std::numbers::pi / 2.0) * std::erf(u / std::numbers::sqrt2);
}

/// Hot point of phi = ln s^u with its first nonvanishing derivatives.
///
/// Hot point 1 (corner): d_x phi < 0, d_y phi = 0 with d_yy phi < 0, d_z phi < 0;
///   dx = 1/(-d_x phi), dy = 1/sqrt(-d_yy phi), dz = 1/(-d_z phi).
/// Hot point 2 (top fibre): d_x phi = 0 with d_xx phi < 0, d_y phi > 0, d_z phi < 0;
///   dx = 1/sqrt(-d_xx phi), dy = 1/d_y phi, dz = 1/(-d_z phi).
struct HotPoint {
    std::array<double, 3> position;
    double severity;
    std::array<double, 3> gradient;  ///< d_x, d_y, d_z of phi
    double d_xx;
    double d_yy;
    std::array<double, 3> delta;  ///< characteristic lengths before k scaling
};

struct LaplaceTerm {
    double integral;  ///< s*^k (V_web + V_flange)
    double v_web;
    double v_flange;

    double web_fraction() const { return v_web / (v_web + v_flange); }
};

struct Table1Row {
    double k;
    double reference;  ///< quadrature value of I'
    LaplaceTerm hot1;
    LaplaceTerm hot2;
    double ratio;          ///< (I'1 + I'2) / I'
    double fraction_hot1;  ///< I'1 / (I'1 + I'2)
    double web_fraction1;
    double web_fraction2;
};

/// Finite-difference steps: 1e-3 m in x and y, 1e-4 m in z.
struct DerivativeSteps {
    double x = 1e-3;
    double y = 1e-3;
    double z = 1e-4;
};

namespace detail {

inline double golden_max(auto&& f, double lo, double hi, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Second-order one-sided first derivative, stepping in direction `dir`.
inline double one_sided(auto&& f, double x0, double step, double dir) {
    return dir * (-3.0 * f(x0) + 4.0 * f(x0 + dir * step) - f(x0 + 2.0 * dir * step)) / (2.0 * step);
}

inline double central_first(auto&& f, double x0, double step) { return (f(x0 + step) - f(x0 - step)) / (2.0 * step); }

inline double central_second(auto&& f, double x0, double step) {
    return (f(x0 + step) - 2.0 * f(x0) + f(x0 - step)) / (step * step);
}

}  // namespace detail

/// x2 = argmax over (0, L/2) of s^u(x, h/2, 0), by golden-section search.
inline double top_fibre_argmax(const ibeam::Section& section, double tol = 1e-6) {
    const auto& g = section.geometry();
    return detail::golden_max([&](double x) { return section.severity(x, g.h / 2.0, 0.0); }, 0.0, g.L / 2.0, tol);
}

/// Locates both hot points and evaluates their derivatives; throws
/// DomainError when the derivative signs do not have the expected structure.
inline std::array<HotPoint, 2> locate_hot_points(const ibeam::Section& section, DerivativeSteps steps = {}) {
    const auto& g = section.geometry();
    auto phi = [&](double x, double y, double z) { return std::log(section.severity(x, y, z)); };
    auto fail = [] { throw DomainError("geometry violates the two-hot-point structure"); };

    HotPoint p1{};
    {
        const double x0 = 0.0, y0 = 0.0, z0 = 0.0;
        p1.position = {x0, y0, z0};
        p1.severity = section.severity(x0, y0, z0);
        p1.gradient[0] = detail::one_sided([&](double x) { return phi(x, y0, z0); }, x0, steps.x, +1.0);
        p1.gradient[1] = detail::central_first([&](double y) { return phi(x0, y, z0); }, y0, steps.y);
        p1.gradient[2] = detail::one_sided([&](double z) { return phi(x0, y0, z); }, z0, steps.z, +1.0);
        p1.d_yy = detail::central_second([&](double y) { return phi(x0, y, z0); }, y0, steps.y);
        p1.d_xx = (phi(x0, y0, z0) - 2.0 * phi(x0 + steps.x, y0, z0) + phi(x0 + 2.0 * steps.x, y0, z0)) /
                  (steps.x * steps.x);
        if (!(p1.gradient[0] < 0.0 && p1.d_yy < 0.0 && p1.gradient[2] < 0.0)) fail();
        if (std::abs(p1.gradient[1]) > 1e-6 * std::abs(p1.gradient[0])) fail();
        p1.delta = {-1.0 / p1.gradient[0], 1.0 / std::sqrt(-p1.d_yy), -1.0 / p1.gradient[2]};
    }

    HotPoint p2{};
    {
        const double x0 = top_fibre_argmax(section), y0 = g.h / 2.0, z0 = 0.0;
        if (!(x0 > 0.0 && x0 < g.L / 2.0)) fail();
        p2.position = {x0, y0, z0};
        p2.severity = section.severity(x0, y0, z0);
        p2.gradient[0] = detail::central_first([&](double x) { return phi(x, y0, z0); }, x0, steps.x);
        p2.gradient[1] = detail::one_sided([&](double y) { return phi(x0, y, z0); }, y0, steps.y, -1.0);
        p2.gradient[2] = detail::one_sided([&](double z) { return phi(x0, y0, z); }, z0, steps.z, +1.0);
        p2.d_xx = detail::central_second([&](double x) { return phi(x, y0, z0); }, x0, steps.x);
        p2.d_yy = (phi(x0, y0, z0) - 2.0 * phi(x0, y0 - steps.y, z0) + phi(x0, y0 - 2.0 * steps.y, z0)) /
                  (steps.y * steps.y);
        if (!(p2.d_xx < 0.0 && p2.gradient[1] > 0.0 && p2.gradient[2] < 0.0)) fail();
        // x2 comes from a 1e-6 m search; d_x phi there is O(tol * d_xx).
        if (std::abs(p2.gradient[0]) > 1e-3 * std::sqrt(-p2.d_xx)) fail();
        p2.delta = {1.0 / std::sqrt(-p2.d_xx), 1.0 / p2.gradient[1], -1.0 / p2.gradient[2]};
    }
    return {p1, p2};
}

inline std::array<HotPoint, 2> locate_hot_points(const ibeam::BeamGeometry& g, DerivativeSteps steps = {}) {
    return locate_hot_points(ibeam::Section(g), steps);
}

/// Contribution of the corner hot point.
inline LaplaceTerm laplace_I1(const ibeam::BeamGeometry& g, double k, const HotPoint& hp) {
    fatiq::detail::require(k > 0.0, "k must be positive");
    const double lx = hp.delta[0] / k, ly = hp.delta[1] / std::sqrt(k), lz = hp.delta[2] / k;
    const double hw = g.web_half_height();
    const double fx = lx * phi1((g.L / 2.0) / lx);
    const double web = fx * ly * phi2(hw / ly) * lz * phi1((g.f / 2.0) / lz);
    const double flange = fx * ly * (phi2((g.h / 2.0) / ly) - phi2(hw / ly)) * lz * phi1((g.b / 2.0) / lz);
    return {std::pow(hp.severity, k) * (web + flange), web, flange};
}

/// Contribution of the top-fibre hot point.
inline LaplaceTerm laplace_I2(const ibeam::BeamGeometry& g, double k, const HotPoint& hp) {
    fatiq::detail::require(k > 0.0, "k must be positive");
    const double lx = hp.delta[0] / std::sqrt(k), ly = hp.delta[1] / k, lz = hp.delta[2] / k;
    const double x2 = hp.position[0];
    const double fx = lx * (phi2(x2 / lx) + phi2((g.L / 2.0 - x2) / lx));
    const double web = fx * ly * (phi1((g.h / 2.0) / ly) - phi1(g.e / ly)) * lz * phi1((g.f / 2.0) / lz);
    const double flange = fx * ly * phi1(g.e / ly) * lz * phi1((g.b / 2.0) / lz);
    return {std::pow(hp.severity, k) * (web + flange), web, flange};
}

/// Midpoint quadrature of I'(k) over the quarter domain.
inline double quadrature_Iprime(const ibeam::BeamGeometry& g, const ibeam::BeamGrid& grid, double k) {
    return ibeam::severity_power_integral(g, grid, k, ibeam::Domain::quarter);
}

inline Table1Row table1_row(const ibeam::BeamGeometry& g, const ibeam::BeamGrid& grid, double k,
                            const std::array<HotPoint, 2>& hps) {
    Table1Row row{};
    row.k = k;
    row.reference = quadrature_Iprime(g, grid, k);
    row.hot1 = laplace_I1(g, k, hps[0]);
    row.hot2 = laplace_I2(g, k, hps[1]);
    const double approx = row.hot1.integral + row.hot2.integral;
    row.ratio = approx / row.reference;
    row.fraction_hot1 = row.hot1.integral / approx;
    row.web_fraction1 = row.hot1.web_fraction();
    row.web_fraction2 = row.hot2.web_fraction();
    return row;
}

inline std::vector<Table1Row> table1(const ibeam::BeamGeometry& g, const ibeam::BeamGrid& grid,
                                     const std::vector<double>& ks) {
    const auto hps = locate_hot_points(g);
    std::vector<Table1Row> rows;
    rows.reserve(ks.size());
    for (double k : ks) rows.push_back(table1_row(g, grid, k, hps));
    return rows;
}

/// Local maxima of s^u(x, y, 0) on an (nx+1) x (ny+1) node grid of the
/// quarter plane, comparing each node with its existing 8 neighbours.
inline std::vector<std::array<double, 2>> local_maxima_z0(const ibeam::Section& section, std::size_t nx,
                                                          std::size_t ny) {
    const auto& g = section.geometry();
    std::vector<double> s((nx + 1) * (ny + 1));
    auto at = [&](std::size_t i, std::size_t j) -> double& { return s[i * (ny + 1) + j]; };
    for (std::size_t i = 0; i <= nx; ++i)
        for (std::size_t j = 0; j <= ny; ++j)
            at(i, j) = section.severity(g.L / 2.0 * static_cast<double>(i) / static_cast<double>(nx),
                                        g.h / 2.0 * static_cast<double>(j) / static_cast<double>(ny), 0.0);
    std::vector<std::array<double, 2>> out;
    for (std::size_t i = 0; i <= nx; ++i) {
        for (std::size_t j = 0; j <= ny; ++j) {
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    auto ii = static_cast<std::ptrdiff_t>(i) + di, jj = static_cast<std::ptrdiff_t>(j) + dj;
                    if (ii < 0 || jj < 0 || ii > static_cast<std::ptrdiff_t>(nx) || jj > static_cast<std::ptrdiff_t>(ny))
                        continue;
                    if (at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) >= at(i, j)) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max)
                out.push_back({g.L / 2.0 * static_cast<double>(i) / static_cast<double>(nx),
                               g.h / 2.0 * static_cast<double>(j) / static_cast<double>(ny)});
        }
    }
    return out;
}

}  // namespace fatiq::laplace
