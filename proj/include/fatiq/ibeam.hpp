#pragma once

// Unitary severity field of a simply supported I-beam under a moving point
// load of 1 MN, and its discretisation into cells.
//
// Units: lengths in m, loads in MN, stresses in MPa (MN/m^2 = MPa).
// Coordinates: x along the span in [0, L], y vertical in [-h/2, h/2],
// z across the flange in [-b/2, b/2]. The web is |y| < h/2 - e, |z| <= f/2;
// each flange is h/2 - e <= |y| <= h/2, |z| <= b/2 (the interface belongs to
// the flange).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "structure.hpp"

namespace fatiq::ibeam {

struct BeamGeometry {
    double b;  ///< flange width
    double f;  ///< web thickness
    double h;  ///< beam height
    double e;  ///< flange thickness
    double L;  ///< span

    BeamGeometry(double b_, double f_, double h_, double e_, double L_) : b(b_), f(f_), h(h_), e(e_), L(L_) {
        fatiq::detail::require(e > 0.0 && e < h / 2.0, "flange thickness must satisfy 0 < e < h/2");
        fatiq::detail::require(f > 0.0 && f < b, "web thickness must satisfy 0 < f < b");
        fatiq::detail::require(L > 0.0, "span must be positive");
    }

    double web_half_height() const { return h / 2.0 - e; }
    double volume() const { return L * (2.0 * b * e + f * (h - 2.0 * e)); }
};

/// 0.65 x 0.012 x 1.315 x 0.06 x 20 m steel beam.
inline BeamGeometry reference_geometry() { return {0.65, 0.012, 1.315, 0.06, 20.0}; }

/// Target mesh steps. Each region (web, flange) gets ceil(extent/step)
/// uniform cells so the web/flange interface is a cell face.
struct BeamGrid {
    double dx;
    double dy;
    double dz_web;
    double dz_flange;

    BeamGrid(double dx_, double dy_, double dz_web_, double dz_flange_)
        : dx(dx_), dy(dy_), dz_web(dz_web_), dz_flange(dz_flange_) {
        fatiq::detail::require(dx > 0.0 && dy > 0.0 && dz_web > 0.0 && dz_flange > 0.0, "grid steps must be positive");
    }
};

/// 2 cm in x, 5 mm in y, 2 mm in z in the web, 1 cm in z in the flange.
inline BeamGrid reference_grid() { return {0.02, 0.005, 0.002, 0.01}; }

/// Unit-load stress components (MPa per MN).
struct UnitStress {
    double sxx;
    double sxy;
    double sxz;
};

/// How the two shear components enter the equivalent stress.
enum class VonMisesForm {
    standard,      ///< sqrt(sxx^2 + 3 sxy^2 + 3 sxz^2)
    summed_shear,  ///< sqrt(sxx^2 + 3 (sxy + sxz)^2)
};

inline double moment_inertia(const BeamGeometry& g) {
    const double web = g.h - 2.0 * g.e;
    return g.b * g.e * g.e * g.e / 12.0 + g.b * g.e * (g.h - g.e) * (g.h - g.e) / 2.0 + g.f * web * web * web / 12.0;
}

namespace detail {

inline void check_span(const BeamGeometry& g, double x, double a) {
    fatiq::detail::require(x >= 0.0 && x <= g.L, "x outside the span");
    fatiq::detail::require(a >= 0.0 && a <= g.L, "load position outside the span");
}

inline bool in_flange(const BeamGeometry& g, double y) { return std::abs(y) >= g.web_half_height(); }

inline void check_section(const BeamGeometry& g, double y, double z) {
    constexpr double slack = 1e-12;
    fatiq::detail::require(std::abs(y) <= g.h / 2.0 + slack, "point above or below the section");
    double half_width = in_flange(g, y) ? g.b / 2.0 : g.f / 2.0;
    fatiq::detail::require(std::abs(z) <= half_width + slack, "point outside the section width");
}

}  // namespace detail

/// M^u(x, a): (L-a)x/L for x <= a, (L-x)a/L for x > a.
inline double bending_moment_u(const BeamGeometry& g, double x, double a) {
    detail::check_span(g, x, a);
    return x <= a ? (g.L - a) * x / g.L : (g.L - x) * a / g.L;
}

/// V^u(x, a): -(L-a)/L for x <= a, a/L for x > a.
inline double shear_u(const BeamGeometry& g, double x, double a) {
    detail::check_span(g, x, a);
    return x <= a ? -(g.L - a) / g.L : a / g.L;
}

/// Precomputed section constants; evaluating the field through this object
/// avoids recomputing I_z and the shear denominators per point.
class Section {
public:
    explicit Section(const BeamGeometry& g, VonMisesForm form = VonMisesForm::standard)
        : geom_(g), form_(form), iz_(ibeam::moment_inertia(g)) {
        const double w = g.h - 2.0 * g.e;
        const double den = g.b * g.h * g.h * g.h - g.b * w * w * w + g.f * w * w * w;
        xy_const_ = 1.5 / g.f * (g.b * g.h * g.h - g.b * w * w + g.f * w * w) / den;
        xy_quad_ = 1.5 / g.f * (4.0 * g.f) / den;
        xz_const_ = 1.5 / g.e * (g.h * g.h - w * w) / den;
    }

    const BeamGeometry& geometry() const noexcept { return geom_; }
    VonMisesForm form() const noexcept { return form_; }
    double moment_inertia() const noexcept { return iz_; }

    /// Stress per unit load for bending moment `moment` and shear `shear`.
    UnitStress stress_from(double y, double z, double moment, double shear) const {
        return {y * moment / iz_, shear * (xy_const_ - xy_quad_ * y * y),
                shear * xz_const_ * (geom_.b / 2.0 - std::abs(z))};
    }

    UnitStress stress(double x, double y, double z, double a) const {
        detail::check_section(geom_, y, z);
        return stress_from(y, z, bending_moment_u(geom_, x, a), shear_u(geom_, x, a));
    }

    double von_mises(const UnitStress& s) const;

    /// Equivalent stress with the load at a = x, on the x <= a side (+1)
    /// or as the limit from the x > a side (-1).
    double von_mises_at_load(double x, double y, double z, int side) const {
        const double moment = (geom_.L - x) * x / geom_.L;
        const double shear = side > 0 ? -(geom_.L - x) / geom_.L : x / geom_.L;
        return von_mises(stress_from(y, z, moment, shear));
    }

    /// max over a in [0, L] of the equivalent stress. The candidates
    /// a = x^- and a = x^+ are always included; `a_grid_points` >= 2 adds a
    /// uniform grid over [0, L]. On each side of a = x the stress is |linear
    /// in a| times a constant, so the candidates alone give the exact max.
    double severity(double x, double y, double z, std::size_t a_grid_points = 0) const {
        detail::check_span(geom_, x, x);
        detail::check_section(geom_, y, z);
        double best = std::max(von_mises_at_load(x, y, z, +1), von_mises_at_load(x, y, z, -1));
        if (a_grid_points >= 2) {
            for (std::size_t i = 0; i < a_grid_points; ++i) {
                double a = geom_.L * static_cast<double>(i) / static_cast<double>(a_grid_points - 1);
                best = std::max(best, von_mises(stress_from(y, z, bending_moment_u(geom_, x, a), shear_u(geom_, x, a))));
            }
        }
        return best;
    }

private:
    BeamGeometry geom_;
    VonMisesForm form_;
    double iz_;
    double xy_const_;
    double xy_quad_;
    double xz_const_;
};

inline double von_mises_u(const UnitStress& s, VonMisesForm form = VonMisesForm::standard) {
    if (form == VonMisesForm::summed_shear) {
        double t = s.sxy + s.sxz;
        return std::sqrt(s.sxx * s.sxx + 3.0 * t * t);
    }
    return std::sqrt(s.sxx * s.sxx + 3.0 * (s.sxy * s.sxy + s.sxz * s.sxz));
}

inline double Section::von_mises(const UnitStress& s) const { return von_mises_u(s, form_); }

inline UnitStress stress_u(const BeamGeometry& g, double x, double y, double z, double a) {
    return Section(g).stress(x, y, z, a);
}

inline constexpr std::size_t default_a_grid_points = 2001;

/// s^u(x, y, z) = max_a sigma_VM(x, y, z; a).
inline double unitary_severity(const BeamGeometry& g, double x, double y, double z,
                               std::size_t a_grid_points = default_a_grid_points) {
    return Section(g).severity(x, y, z, a_grid_points);
}

enum class Domain {
    full,     ///< the whole beam
    quarter,  ///< 0 <= x <= L/2, 0 <= y <= h/2, 0 <= z; one eighth of the volume
};

namespace detail {

struct Interval {
    double lo;
    double hi;
    std::size_t cells;
    double step() const { return (hi - lo) / static_cast<double>(cells); }
    double mid(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * step(); }
};

inline std::size_t cells_for(double extent, double step) {
    return static_cast<std::size_t>(std::max(1.0, std::ceil(extent / step - 1e-9)));
}

// Cross-section bands: (y interval, z interval). The full domain uses twice
// the half-extent counts so it mirrors the quarter grid exactly.
struct Band {
    Interval y;
    Interval z;
};

inline std::vector<Band> section_bands(const BeamGeometry& g, const BeamGrid& grid, Domain domain) {
    const double hw = g.web_half_height();
    const std::size_t ny_web = cells_for(hw, grid.dy);
    const std::size_t ny_flange = cells_for(g.e, grid.dy);
    const std::size_t nz_web = cells_for(g.f / 2.0, grid.dz_web);
    const std::size_t nz_flange = cells_for(g.b / 2.0, grid.dz_flange);
    if (domain == Domain::quarter) {
        return {{{0.0, hw, ny_web}, {0.0, g.f / 2.0, nz_web}},
                {{hw, g.h / 2.0, ny_flange}, {0.0, g.b / 2.0, nz_flange}}};
    }
    return {{{-g.h / 2.0, -hw, ny_flange}, {-g.b / 2.0, g.b / 2.0, 2 * nz_flange}},
            {{-hw, hw, 2 * ny_web}, {-g.f / 2.0, g.f / 2.0, 2 * nz_web}},
            {{hw, g.h / 2.0, ny_flange}, {-g.b / 2.0, g.b / 2.0, 2 * nz_flange}}};
}

inline Interval span_interval(const BeamGeometry& g, const BeamGrid& grid, Domain domain) {
    std::size_t half = cells_for(g.L / 2.0, grid.dx);
    return domain == Domain::quarter ? Interval{0.0, g.L / 2.0, half} : Interval{0.0, g.L, 2 * half};
}

}  // namespace detail

/// Number of cells severity_grid produces.
inline std::size_t grid_cell_count(const BeamGeometry& g, const BeamGrid& grid, Domain domain) {
    std::size_t per_slab = 0;
    for (const auto& band : detail::section_bands(g, grid, domain)) per_slab += band.y.cells * band.z.cells;
    return detail::span_interval(g, grid, domain).cells * per_slab;
}

/// Midpoint-sampled severity cells tiling the domain. Cells are ordered by
/// x slab, then band, then y, then z.
inline CellPartition severity_grid(const BeamGeometry& g, const BeamGrid& grid, Domain domain = Domain::full,
                                   std::size_t a_grid_points = 0) {
    const Section section(g);
    const auto xs = detail::span_interval(g, grid, domain);
    const auto bands = detail::section_bands(g, grid, domain);
    std::size_t per_slab = 0;
    for (const auto& band : bands) per_slab += band.y.cells * band.z.cells;

    std::vector<Cell> cells(xs.cells * per_slab);
    parallel_for(xs.cells, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double x = xs.mid(i);
            std::size_t k = i * per_slab;
            for (const auto& band : bands) {
                const double vol = xs.step() * band.y.step() * band.z.step();
                for (std::size_t j = 0; j < band.y.cells; ++j) {
                    const double y = band.y.mid(j);
                    for (std::size_t l = 0; l < band.z.cells; ++l) {
                        const double z = band.z.mid(l);
                        cells[k++] = Cell{vol, section.severity(x, y, z, a_grid_points), {x, y, z}};
                    }
                }
            }
        }
    });
    return CellPartition(std::move(cells));
}

/// Sum over the domain's midpoint cells of s^k * volume, without storing cells.
inline double severity_power_integral(const BeamGeometry& g, const BeamGrid& grid, double k,
                                      Domain domain = Domain::quarter) {
    const Section section(g);
    const auto xs = detail::span_interval(g, grid, domain);
    const auto bands = detail::section_bands(g, grid, domain);
    std::vector<double> slab(xs.cells);
    parallel_for(xs.cells, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double x = xs.mid(i);
            double sum = 0.0;
            for (const auto& band : bands) {
                const double vol = xs.step() * band.y.step() * band.z.step();
                double band_sum = 0.0;
                for (std::size_t j = 0; j < band.y.cells; ++j)
                    for (std::size_t l = 0; l < band.z.cells; ++l)
                        band_sum += std::pow(section.severity(x, band.y.mid(j), band.z.mid(l)), k);
                sum += vol * band_sum;
            }
            slab[i] = sum;
        }
    });
    return compensated_sum(slab);
}

}  // namespace fatiq::ibeam
