#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace solitonlab {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Unit system: lengths in micrometers, time in microseconds, every rate and
// Rabi frequency stored as an angular frequency (rad/us).

class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Rates quoted in cyclic units, the way lab parameters are usually written
/// (Gamma/2pi = 16 MHz and so on). Converted to angular units exactly once.
struct CyclicInputs {
    double lambda_p_um = 0.461;
    double gamma_e_mhz = 16.0;            // Gamma_e / 2pi
    double gamma_r_khz = 16.7;            // Gamma_r / 2pi
    double omega_c_over_gamma_e = 1.0;
    double omega_p0_over_gamma_e = 0.2;
    double delta_ghz = -2.0;              // Delta / 2pi
    double c6_ghz_um6 = -81.6;            // C6 / 2pi
    double n_a_um3 = 2.0;                 // 1 um^-3 == 1e12 cm^-3
    double r0_um = 3.0;
    std::optional<double> kappa_override;
};

struct PhysicalParams {
    double lambda_p = 0.461;  // um
    double gamma_e = 0.0;     // rad/us
    double gamma_r = 0.0;
    double omega_c = 0.0;
    double omega_p0 = 0.0;
    double delta = 0.0;       // signed
    double c6 = 0.0;          // rad/us * um^6, signed
    double n_a = 0.0;         // um^-3
    double r0 = 3.0;          // um
    std::optional<double> kappa_override;  // rad/us/um

    static PhysicalParams from_cyclic(const CyclicInputs& in);
    CyclicInputs to_cyclic() const;

    /// 88Sr ladder with the 5s60s Rydberg level, Delta/2pi = -2 GHz.
    static PhysicalParams reference_sr88();

    /// Throws ValidationError naming the first offending field.
    void validate() const;
};

struct DerivedParams {
    double k_p = 0.0;        // 1/um
    double l_diff = 0.0;     // um
    double delta_eit = 0.0;  // rad/us
    double r_b = 0.0;        // um
    double kappa = 0.0;      // rad/us/um
    cplx gamma_prime;        // Gamma_e - 2i Delta
};

DerivedParams derive(const PhysicalParams& p);

/// Coupling derived from the spontaneous-emission rate of the probe
/// transition: kappa = 3 pi N_a Gamma_e / k_p^2.
double kappa_from_decay(double n_a, double gamma_e, double k_p);

}  // namespace solitonlab
