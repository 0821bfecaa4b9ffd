#include "solitonlab/response.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace solitonlab {

namespace {

constexpr cplx I{0.0, 1.0};

// Integral of (R^2 + z^2)^(-m) over z in [z0, inf) for z0 > R, as a series
// in (R/z0)^2.
double power_tail(int m, double r, double z0) {
    double coeff = 1.0;  // (-1)^k C(m+k-1, k)
    double rk = 1.0;  // R^(2k)
    double sum = 0.0;
    for (int k = 0; k < 60; ++k) {
        const double term = coeff * rk / ((2 * m - 1 + 2 * k) * std::pow(z0, 2 * m - 1 + 2 * k));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
        coeff *= -static_cast<double>(m + k) / (k + 1);
        rk *= r * r;
    }
    return sum;
}

}  // namespace

cplx linear_coefficient(const PhysicalParams& p) {
    const cplx gp(p.gamma_e, -2.0 * p.delta);
    return 2.0 * I * p.gamma_r / (4.0 * p.omega_c * p.omega_c + gp * p.gamma_r);
}

double local_kerr_denominator(const PhysicalParams& p) {
    const double ge = p.gamma_e, gr = p.gamma_r, oc2 = p.omega_c * p.omega_c, d = p.delta;
    const double inner = ge * ge * gr * gr + 8.0 * ge * ge * oc2 + 4.0 * gr * gr * d * d + 16.0 * oc2 * oc2;
    return ge * inner * inner;
}

cplx local_kerr_coefficient(const PhysicalParams& p) {
    const double gr = p.gamma_r;
    const cplx bracket = 4.0 * I * p.omega_c * p.omega_c + gr * cplx(-2.0 * p.delta, p.gamma_e);
    return 16.0 * I * gr * gr * bracket * bracket / local_kerr_denominator(p);
}

ResponseCoefficients response_coefficients(const PhysicalParams& p) {
    return {linear_coefficient(p), local_kerr_coefficient(p)};
}

KernelConstants kernel_constants(const PhysicalParams& p) {
    const cplx gp(p.gamma_e, -2.0 * p.delta);
    const double gr = p.gamma_r;
    const double oc2 = p.omega_c * p.omega_c;
    const cplx lin = 4.0 * oc2 + gp * gr;
    KernelConstants k;
    k.prefactor = 256.0 * (gp + gr) * oc2 * oc2 / ((4.0 * I * oc2 - gp * gr) * std::norm(lin));
    k.b = 4.0 * oc2 - gp * (gp + gr);
    k.d0 = 4.0 * gp * oc2 + gr * k.b;
    k.c6 = p.c6;
    k.knee = std::pow(std::abs(p.c6 * k.b) / std::abs(k.d0), 1.0 / 6.0);
    return k;
}

cplx apply_convention(cplx literal, KernelConvention c) {
    switch (c) {
        case KernelConvention::literal:
            return literal;
        case KernelConvention::passive:
            return -I * std::conj(literal);
    }
    return literal;
}

cplx kernel_integrand(const KernelConstants& k, double r, double z) {
    const double s2 = r * r + z * z;
    const double s6 = s2 * s2 * s2;
    return k.c6 / (k.d0 * s6 + I * k.c6 * k.b);
}

cplx nonlocal_kernel(const PhysicalParams& p, double r, const KernelOptions& opts) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("R", "must be finite and >= 0");
    p.validate();
    const KernelConstants k = kernel_constants(p);
    const double z_cut = 8.0 * std::max(k.knee, r);

    QuadratureOptions qo;
    qo.rel_tol = opts.rel_tol;
    qo.max_intervals = opts.max_intervals;
    auto f = [&](double z) { return kernel_integrand(k, r, z); };

    // The interaction resonance sits at s = knee; put it on a breakpoint.
    cplx body;
    if (r < k.knee) {
        const double z_res = std::sqrt(k.knee * k.knee - r * r);
        body = integrate_adaptive(f, 0.0, z_res, qo).value + integrate_adaptive(f, z_res, z_cut, qo).value;
    } else {
        body = integrate_adaptive(f, 0.0, z_cut, qo).value;
    }
    // Beyond z_cut: C6/(d0 s^6) * (1 - q/s^6 + ...), q = i C6 b / d0, |q|/s^6 < 8^-6.
    const cplx c6_d0 = k.c6 / k.d0;
    const cplx q = I * k.c6 * k.b / k.d0;
    const cplx tail = c6_d0 * (power_tail(3, r, z_cut) - q * power_tail(6, r, z_cut));

    return apply_convention(k.prefactor * 2.0 * (body + tail), opts.convention);
}

cplx kernel_tail_coefficient(const PhysicalParams& p, KernelConvention c) {
    const KernelConstants k = kernel_constants(p);
    return apply_convention(k.prefactor * k.c6 * (3.0 * std::numbers::pi / 8.0) / k.d0, c);
}

KernelTable::KernelTable(std::vector<double> radii, std::vector<cplx> values, cplx tail_coefficient)
    : radii_(std::move(radii)), values_(std::move(values)), tail_(tail_coefficient) {
    if (radii_.size() != values_.size() || radii_.size() < 2) {
        throw std::invalid_argument("KernelTable: need >= 2 radii with matching values");
    }
    if (radii_.front() != 0.0) throw std::invalid_argument("KernelTable: radii must start at 0");
    std::vector<double> re(values_.size()), im(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        re[i] = values_[i].real();
        im[i] = values_[i].imag();
    }
    re_ = MonotoneCubic(radii_, re);
    im_ = MonotoneCubic(radii_, im);
}

cplx KernelTable::operator()(double r) const {
    if (r > radii_.back()) {
        const double r2 = r * r;
        return tail_ / (r2 * r2 * r);
    }
    return {re_(r), im_(r)};
}

cplx KernelTable::radial_integral() const {
    const double rm = radii_.back();
    return cplx(re_.integral(), im_.integral()) + tail_ / (4.0 * rm * rm * rm * rm);
}

KernelTable KernelTable::real_part() const {
    std::vector<cplx> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i].real();
    return KernelTable(radii_, std::move(v), tail_.real());
}

KernelTable KernelTable::scaled(cplx factor) const {
    std::vector<cplx> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] * factor;
    return KernelTable(radii_, std::move(v), tail_ * factor);
}

std::vector<double> graded_radii(double r_max, double r_b, int n_samples) {
    const double a = r_b / 8.0;
    const double span = std::log((r_max + a) / a);
    std::vector<double> r(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        r[static_cast<std::size_t>(i)] = a * std::expm1(span * i / (n_samples - 1));
    }
    r.front() = 0.0;
    r.back() = r_max;
    return r;
}

KernelTable build_kernel_table(const PhysicalParams& p, double r_max, int n_samples,
                               const KernelOptions& opts) {
    if (!(r_max > 0.0)) throw ValidationError("r_max", "must be > 0");
    if (n_samples < 16) throw ValidationError("n_samples", "must be >= 16");
    const DerivedParams d = derive(p);
    std::vector<double> radii = graded_radii(r_max, d.r_b, n_samples);
    std::vector<cplx> values(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        try {
            values[i] = nonlocal_kernel(p, radii[i], opts);
        } catch (const QuadratureError& e) {
            std::ostringstream os;
            os << "kernel quadrature failed at R = " << radii[i] << " um: " << e.what();
            throw QuadratureError(os.str(), e.partial());
        }
    }
    return KernelTable(std::move(radii), std::move(values), kernel_tail_coefficient(p, opts.convention));
}

PotentialStrengths potential_strengths(const PhysicalParams& p, const KernelTable& table) {
    const DerivedParams d = derive(p);
    if (!(p.omega_p0 > 0.0)) throw ValidationError("omega_p0", "must be > 0 to normalize K1");
    PotentialStrengths k;
    k.k1 = -d.kappa * linear_coefficient(p) / (p.omega_p0 * p.omega_p0);
    k.k2 = -d.kappa * local_kerr_coefficient(p);
    k.k3 = -d.kappa * p.n_a * table.radial_integral();
    return k;
}

PotentialStrengths potential_strengths(const PhysicalParams& p, const KernelOptions& opts) {
    const DerivedParams d = derive(p);
    return potential_strengths(p, build_kernel_table(p, 50.0 * d.r_b, 1024, opts));
}

}  // namespace solitonlab
