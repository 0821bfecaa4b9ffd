#pragma once

#include "solitonlab/interp.hpp"
#include "solitonlab/quadrature.hpp"
#include "solitonlab/units.hpp"

#include <vector>

namespace solitonlab {

// Steady-state response of the Rydberg-EIT ladder to third order in the
// probe: linear and local Kerr coefficients plus the nonlocal kernel obtained
// by integrating the pair interaction C6/|r - r'|^6 along z'.

struct ResponseCoefficients {
    cplx rho1;   // linear, 1/(rad/us)
    cplx rho31;  // local Kerr, 1/(rad/us)^3
};

cplx linear_coefficient(const PhysicalParams& p);
cplx local_kerr_coefficient(const PhysicalParams& p);
ResponseCoefficients response_coefficients(const PhysicalParams& p);

/// Denominator of the local Kerr coefficient; even in Delta.
double local_kerr_denominator(const PhysicalParams& p);

/// Phase convention applied to the nonlocal kernel.
///  literal: the closed-form kernel evaluated exactly as derived.
///  passive: -i * conj(literal). Blockade-induced absorption then has
///           Im > 0 (loss, like rho1), and the response is self-focusing
///           for Delta < 0 and defocusing for Delta > 0.
enum class KernelConvention { literal, passive };

struct KernelOptions {
    double rel_tol = 1e-8;
    int max_intervals = 4000;
    KernelConvention convention = KernelConvention::passive;
};

/// Scalars that fully determine the kernel integrand
/// C6 / (d0 * s^6 + i * C6 * b), s^2 = R^2 + z'^2.
struct KernelConstants {
    cplx prefactor;  // 256 (G' + Gr) Oc^4 / ((4i Oc^2 - G' Gr) |4 Oc^2 + G' Gr|^2)
    cplx b;          // 4 Oc^2 - G'(G' + Gr)
    cplx d0;         // 4 G' Oc^2 + Gr * b
    double c6 = 0.0;
    double knee = 0.0;  // (|C6 b| / |d0|)^(1/6): radius where the interaction term takes over
};

KernelConstants kernel_constants(const PhysicalParams& p);

/// Map a literal-convention value to the requested convention.
cplx apply_convention(cplx literal, KernelConvention c);

/// The z'-integrand at fixed R, literal convention, without the prefactor.
cplx kernel_integrand(const KernelConstants& k, double r, double z);

/// Nonlocal kernel rho32(R) in um/(rad/us)^3. R = 0 is regular: the integrand
/// tends to 1/(i b) as s -> 0. Throws QuadratureError on non-convergence.
cplx nonlocal_kernel(const PhysicalParams& p, double r, const KernelOptions& opts = {});

/// Asymptotic coefficient A with kernel(R) ~ A / R^5 for R >> knee.
cplx kernel_tail_coefficient(const PhysicalParams& p, KernelConvention c = KernelConvention::passive);

/// Radial tabulation of the kernel on a graded mesh with monotone-cubic
/// interpolation of the real and imaginary parts and an A/R^5 tail.
class KernelTable {
public:
    KernelTable() = default;
    KernelTable(std::vector<double> radii, std::vector<cplx> values, cplx tail_coefficient);

    cplx operator()(double r) const;

    const std::vector<double>& radii() const noexcept { return radii_; }
    const std::vector<cplx>& values() const noexcept { return values_; }
    cplx tail_coefficient() const noexcept { return tail_; }
    double r_max() const { return radii_.back(); }
    bool empty() const noexcept { return radii_.empty(); }

    /// Integral of the kernel over R in [0, inf): interpolant plus closed tail.
    cplx radial_integral() const;

    /// Copy with the imaginary part removed (values and tail).
    KernelTable real_part() const;
    /// Copy scaled by a constant.
    KernelTable scaled(cplx factor) const;

private:
    std::vector<double> radii_;
    std::vector<cplx> values_;
    cplx tail_;
    MonotoneCubic re_, im_;
};

/// Radii with density proportional to 1/(R + r_b/8) on [0, r_max].
std::vector<double> graded_radii(double r_max, double r_b, int n_samples);

/// Throws QuadratureError naming the offending radius.
KernelTable build_kernel_table(const PhysicalParams& p, double r_max, int n_samples,
                               const KernelOptions& opts = {});

struct PotentialStrengths {
    cplx k1;  // -kappa rho1 / Omega_p0^2
    cplx k2;  // -kappa rho31
    cplx k3;  // -kappa N_a * integral of rho32(R) dR
};

PotentialStrengths potential_strengths(const PhysicalParams& p, const KernelTable& table);
PotentialStrengths potential_strengths(const PhysicalParams& p, const KernelOptions& opts = {});

}  // namespace solitonlab
