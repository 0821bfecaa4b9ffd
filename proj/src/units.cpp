#include "solitonlab/units.hpp"

#include <cmath>

namespace solitonlab {

PhysicalParams PhysicalParams::from_cyclic(const CyclicInputs& in) {
    PhysicalParams p;
    p.lambda_p = in.lambda_p_um;
    p.gamma_e = two_pi * in.gamma_e_mhz;
    p.gamma_r = two_pi * in.gamma_r_khz * 1e-3;
    p.omega_c = in.omega_c_over_gamma_e * p.gamma_e;
    p.omega_p0 = in.omega_p0_over_gamma_e * p.gamma_e;
    p.delta = two_pi * in.delta_ghz * 1e3;
    p.c6 = two_pi * in.c6_ghz_um6 * 1e3;
    p.n_a = in.n_a_um3;
    p.r0 = in.r0_um;
    p.kappa_override = in.kappa_override;
    return p;
}

CyclicInputs PhysicalParams::to_cyclic() const {
    CyclicInputs in;
    in.lambda_p_um = lambda_p;
    in.gamma_e_mhz = gamma_e / two_pi;
    in.gamma_r_khz = gamma_r / two_pi * 1e3;
    in.omega_c_over_gamma_e = omega_c / gamma_e;
    in.omega_p0_over_gamma_e = omega_p0 / gamma_e;
    in.delta_ghz = delta / two_pi * 1e-3;
    in.c6_ghz_um6 = c6 / two_pi * 1e-3;
    in.n_a_um3 = n_a;
    in.r0_um = r0;
    in.kappa_override = kappa_override;
    return in;
}

PhysicalParams PhysicalParams::reference_sr88() { return from_cyclic(CyclicInputs{}); }

void PhysicalParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!std::isfinite(v) || !(v > 0.0)) {
            throw ValidationError(name, "must be finite and > 0");
        }
    };
    positive(lambda_p, "lambda_p");
    positive(r0, "r0");
    positive(omega_c, "omega_c");
    positive(gamma_e, "gamma_e");
    positive(gamma_r, "gamma_r");
    positive(n_a, "n_a");
    if (!std::isfinite(omega_p0) || omega_p0 < 0.0) {
        throw ValidationError("omega_p0", "must be finite and >= 0");
    }
    if (!std::isfinite(delta)) throw ValidationError("delta", "must be finite");
    if (!std::isfinite(c6) || c6 == 0.0) throw ValidationError("c6", "must be finite and nonzero");
    if (kappa_override && (!std::isfinite(*kappa_override) || *kappa_override <= 0.0)) {
        throw ValidationError("kappa_override", "must be finite and > 0");
    }
}

double kappa_from_decay(double n_a, double gamma_e, double k_p) {
    return 3.0 * std::numbers::pi * n_a * gamma_e / (k_p * k_p);
}

DerivedParams derive(const PhysicalParams& p) {
    p.validate();
    DerivedParams d;
    d.k_p = two_pi / p.lambda_p;
    d.l_diff = d.k_p * p.r0 * p.r0;
    d.delta_eit = p.omega_c * p.omega_c / std::abs(cplx(p.delta, p.gamma_e / 2.0));
    d.r_b = std::pow(std::abs(p.c6) / d.delta_eit, 1.0 / 6.0);
    d.kappa = p.kappa_override ? *p.kappa_override : kappa_from_decay(p.n_a, p.gamma_e, d.k_p);
    d.gamma_prime = cplx(p.gamma_e, -2.0 * p.delta);
    return d;
}

}  // namespace solitonlab
