#pragma once

#include "solitonlab/units.hpp"

#include <span>
#include <vector>

namespace solitonlab {

/// Uniform transverse lattice centered on the origin. Sample (ix, iy) sits at
/// x = (ix - nx/2) dx, y = (iy - ny/2) dy, so the origin is a grid point.
struct Grid {
    int nx = 256;
    int ny = 256;
    double dx = 0.1875;
    double dy = 0.1875;

    static Grid square(int n, double extent);
    /// 256^2; extent 16 R0 for |l| <= 3 and 24 R0 beyond.
    static Grid for_beam(const PhysicalParams& p, int max_abs_l, int n = 256);

    void validate() const;
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    double extent_x() const { return nx * dx; }
    double extent_y() const { return ny * dy; }
    double x(int ix) const { return (ix - nx / 2) * dx; }
    double y(int iy) const { return (iy - ny / 2) * dy; }
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
    }
    /// True when both extents are at least 8 r0.
    bool covers(double r0) const { return extent_x() >= 8.0 * r0 && extent_y() >= 8.0 * r0; }

    bool operator==(const Grid&) const = default;
};

/// Complex envelope U(x, y) at distance z, in rad/us; the optical carrier
/// exp(i k_p z) is factored out. Row-major: index = iy * nx + ix.
struct ComplexField {
    Grid grid;
    double z = 0.0;
    std::vector<cplx> amplitude;

    ComplexField() = default;
    explicit ComplexField(const Grid& g, double z0 = 0.0) : grid(g), z(z0), amplitude(g.size()) {}

    cplx& at(int ix, int iy) { return amplitude[grid.index(ix, iy)]; }
    cplx at(int ix, int iy) const { return amplitude[grid.index(ix, iy)]; }

    /// Sum of |U|^2 dx dy.
    double power() const;

    bool operator==(const ComplexField&) const = default;
};

/// Omega_p0 (r/R0)^|l| exp(-r^2/R0^2) exp(i l phi) at z = 0.
ComplexField make_vortex(const Grid& grid, const PhysicalParams& p, int l);

/// Sum of the l1 and l2 vortices; l1 = -l2 is an optical Ferris wheel.
ComplexField make_ofw(const Grid& grid, const PhysicalParams& p, int l1, int l2);

/// Analytic sample of the same superposition at an arbitrary point.
cplx ofw_value(const PhysicalParams& p, int l1, int l2, double x, double y);

}  // namespace solitonlab
