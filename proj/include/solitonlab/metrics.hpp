#pragma once

#include "solitonlab/field.hpp"

#include <stdexcept>

namespace solitonlab {

struct RunRecord {
    double z = 0.0;               // um
    double j = 0.0;               // fidelity against the z = 0 field
    double power = 0.0;           // sum |U|^2 dx dy
    double peak_intensity = 0.0;  // max |U|^2 / Omega_p0^2
    double rms_radius = 0.0;      // um
};

struct BeamStats {
    double power = 0.0;
    double peak_intensity = 0.0;
    double rms_radius = 0.0;
};

class UndefinedMetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Normalized overlap |<u0, u>|^2 / (|u|^2 |u0|^2), with u0 conjugated so that
/// fidelity(u, u) == 1. Bounded to [0, 1] by Cauchy-Schwarz.
double fidelity(const ComplexField& u, const ComplexField& u0);

/// Radii are measured from the grid origin; all beams here are origin-centred.
BeamStats beam_stats(const ComplexField& u, double omega_p0);

RunRecord make_record(const ComplexField& u, const ComplexField& u0, double omega_p0);

}  // namespace solitonlab
