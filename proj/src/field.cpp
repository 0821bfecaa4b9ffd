#include "solitonlab/field.hpp"

#include <cmath>
#include <iostream>

namespace solitonlab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

cplx vortex_term(double r_over_r0, double phi, int l) {
    const double radial = std::pow(r_over_r0, std::abs(l));
    return radial * std::polar(1.0, l * phi);
}

void warn_if_small(const Grid& grid, const PhysicalParams& p) {
    if (!grid.covers(p.r0)) {
        std::cerr << "[warn] grid extent " << grid.extent_x() << " x " << grid.extent_y()
                  << " um is below 8 R0 = " << 8.0 * p.r0 << " um\n";
    }
}

}  // namespace

Grid Grid::square(int n, double extent) {
    Grid g{n, n, extent / n, extent / n};
    g.validate();
    return g;
}

Grid Grid::for_beam(const PhysicalParams& p, int max_abs_l, int n) {
    return square(n, (max_abs_l >= 4 ? 24.0 : 16.0) * p.r0);
}

void Grid::validate() const {
    if (!is_power_of_two(nx) || !is_power_of_two(ny)) {
        throw ValidationError("grid.n", "sample counts must be powers of two");
    }
    if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
        throw ValidationError("grid.spacing", "must be finite and > 0");
    }
}

double ComplexField::power() const {
    double sum = 0.0;
    for (const cplx& u : amplitude) sum += std::norm(u);
    return sum * grid.dx * grid.dy;
}

cplx ofw_value(const PhysicalParams& p, int l1, int l2, double x, double y) {
    const double r = std::hypot(x, y);
    // phi at the origin is defined as 0.
    const double phi = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
    const double s = r / p.r0;
    const double envelope = p.omega_p0 * std::exp(-s * s);
    return envelope * (vortex_term(s, phi, l1) + vortex_term(s, phi, l2));
}

ComplexField make_vortex(const Grid& grid, const PhysicalParams& p, int l) {
    grid.validate();
    warn_if_small(grid, p);
    ComplexField f(grid);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double x = grid.x(ix), y = grid.y(iy);
            const double r = std::hypot(x, y);
            const double phi = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
            const double s = r / p.r0;
            f.at(ix, iy) = p.omega_p0 * std::exp(-s * s) * vortex_term(s, phi, l);
        }
    }
    return f;
}

ComplexField make_ofw(const Grid& grid, const PhysicalParams& p, int l1, int l2) {
    grid.validate();
    warn_if_small(grid, p);
    ComplexField f(grid);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            f.at(ix, iy) = ofw_value(p, l1, l2, grid.x(ix), grid.y(iy));
        }
    }
    return f;
}

}  // namespace solitonlab
