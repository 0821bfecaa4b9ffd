#pragma once

#include "solitonlab/fft.hpp"
#include "solitonlab/field.hpp"
#include "solitonlab/metrics.hpp"
#include "solitonlab/response.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

namespace solitonlab {

enum class PropagationMode {
    reduced,  // diffraction + nonlocal term only
    full,     // adds the linear and local Kerr terms
};

/// Super-Gaussian absorber: per step the field is multiplied by
/// exp(-strength dz g), g = exp(-(d/w)^8), d the distance to the nearest
/// edge and w = width_fraction * extent.
struct AbsorbingBoundary {
    bool enabled = true;
    double width_fraction = 0.1;
    double strength = 0.1;  // 1/um at the edge
};

struct PropagationConfig {
    double dz = 0.0;  // <= 0 selects l_diff / 200
    double z_end = 0.0;
    PropagationMode mode = PropagationMode::reduced;
    int record_every = 1;
    std::shared_ptr<const KernelTable> kernel;
    AbsorbingBoundary absorber;

    /// Throws ValidationError; returns a warning message (empty if none).
    std::string validate(const DerivedParams& d) const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double z, double max_amplitude, std::vector<RunRecord> partial = {})
        : std::runtime_error(what), z_(z), max_amplitude_(max_amplitude), partial_(std::move(partial)) {}
    double z() const noexcept { return z_; }
    double max_amplitude() const noexcept { return max_amplitude_; }
    const std::vector<RunRecord>& partial_records() const noexcept { return partial_; }
    void set_partial_records(std::vector<RunRecord> r) { partial_ = std::move(r); }

private:
    double z_;
    double max_amplitude_;
    std::vector<RunRecord> partial_;
};

/// Kernel rasterized on a zero-padded (2nx x 2ny) lattice and transformed
/// once, so that the spectral product gives the linear (non-circular)
/// convolution over the grid.
class NonlocalConvolver {
public:
    NonlocalConvolver(const Grid& grid, const KernelTable& kernel, cplx coupling);

    /// out = coupling * sum_{r'} kernel(|r - r'|) intensity(r') dx dy
    void apply(std::span<const double> intensity, std::span<cplx> out) const;

    const Grid& grid() const noexcept { return grid_; }
    bool complex_kernel() const noexcept { return !im_spectrum_.empty(); }

private:
    Grid grid_;
    int px_, py_;
    RealFft2d fft_;
    // Half spectra of the real and imaginary kernel parts, scaled by dx dy.
    std::vector<cplx> re_spectrum_;
    std::vector<cplx> im_spectrum_;  // empty for a real kernel
    cplx coupling_;
    mutable AlignedVector<double> padded_;
    mutable AlignedVector<cplx> spectrum_;
    mutable AlignedVector<cplx> spectrum_im_;
    mutable AlignedVector<double> result_im_;
};

/// kappa N_a (rho32 * |U|^2) on the field's grid.
std::vector<cplx> nonlocal_phase(const ComplexField& field, const KernelTable& kernel, const PhysicalParams& p);

using RecordCallback = std::function<void(const RunRecord&, const ComplexField&)>;

struct PropagationResult {
    ComplexField field;
    std::vector<RunRecord> records;
};

/// Strang split-step integrator: half diffraction step in k-space, full
/// nonlinear phase exp(i dz Phi) in real space, half diffraction step. When
/// Im(Phi) depends on the intensity, Phi is taken at the midpoint intensity
/// of the nonlinear step so the scheme stays second order.
class Propagator {
public:
    Propagator(const Grid& grid, const PhysicalParams& p, const PropagationConfig& cfg);

    /// One step of size dz (defaults to the configured step). Throws
    /// DivergenceError if the field stops being finite.
    void step(ComplexField& field, double dz = 0.0) const;

    /// Total potential Phi for the current field (1/um).
    std::vector<cplx> potential(const ComplexField& field) const;

    /// Advance by `distance` in ceil(distance / dz) equal steps, recording
    /// every record_every steps (relative to `input`) and after the last one.
    void advance(ComplexField& field, double distance, const ComplexField& input,
                 std::vector<RunRecord>& records, const RecordCallback& on_record = {}) const;

    /// From field.z to cfg.z_end; records include the starting point.
    PropagationResult propagate(const ComplexField& input, const RecordCallback& on_record = {}) const;

    double dz() const noexcept { return dz_; }
    const PhysicalParams& params() const noexcept { return params_; }

private:
    // Diffraction over `length`: spectrum times exp(-i length k^2 / (2 k_p)).
    void linear_step(std::span<cplx> data, double length) const;
    void nonlinear_step(std::span<cplx> data, double dz) const;
    void check_finite(const ComplexField& field) const;

    Grid grid_;
    PhysicalParams params_;
    DerivedParams derived_;
    PropagationConfig cfg_;
    double dz_;
    Fft2d fft_;
    std::unique_ptr<NonlocalConvolver> convolver_;
    std::vector<double> k2_;       // kx^2 + ky^2
    std::vector<double> absorber_; // g(x, y) profile, empty when disabled
    mutable std::vector<double> damping_;  // exp(-strength dz g) for absorber_dz_
    mutable double absorber_dz_ = -1.0;
    cplx linear_term_;             // kappa rho1 (full mode)
    cplx kerr_term_;               // kappa rho31 (full mode)
    bool intensity_dependent_gain_ = false;  // Im(Phi) depends on |U|^2
    struct PhaseCache {
        double length = -1.0;
        std::vector<cplx> factors;
    };
    mutable PhaseCache linear_cache_[2];  // half and full steps
    mutable std::vector<double> intensity_;
    mutable std::vector<cplx> phi_;
};

/// Convenience wrappers.
ComplexField step(const ComplexField& field, const PropagationConfig& cfg, const PhysicalParams& p);
PropagationResult propagate(const ComplexField& input, const PropagationConfig& cfg, const PhysicalParams& p,
                            const RecordCallback& on_record = {});

}  // namespace solitonlab
