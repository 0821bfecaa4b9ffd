#include "solitonlab/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace solitonlab {

namespace {

double edge_profile(double coord, double half_extent, double width) {
    const double d = std::max(0.0, half_extent - std::abs(coord)) / width;
    const double d2 = d * d, d4 = d2 * d2;
    return std::exp(-d4 * d4);
}

}  // namespace

std::string PropagationConfig::validate(const DerivedParams& d) const {
    const double step = dz > 0.0 ? dz : d.l_diff / 200.0;
    if (!std::isfinite(step) || !(step > 0.0)) throw ValidationError("propagation.dz", "must be > 0");
    if (!std::isfinite(z_end) || z_end < 0.0) throw ValidationError("propagation.z_end", "must be >= 0");
    if (record_every < 1) throw ValidationError("propagation.record_every", "must be >= 1");
    if (!kernel || kernel->empty()) throw ValidationError("propagation.kernel", "kernel table required");
    if (absorber.enabled && (!(absorber.width_fraction > 0.0) || absorber.width_fraction >= 0.5 ||
                             !(absorber.strength >= 0.0))) {
        throw ValidationError("propagation.absorber", "width fraction must be in (0, 0.5), strength >= 0");
    }
    if (step > d.l_diff / 50.0) {
        std::ostringstream os;
        os << "dz = " << step << " um exceeds l_diff/50 = " << d.l_diff / 50.0 << " um";
        return os.str();
    }
    return {};
}

NonlocalConvolver::NonlocalConvolver(const Grid& grid, const KernelTable& kernel, cplx coupling)
    : grid_(grid),
      px_(2 * grid.nx),
      py_(2 * grid.ny),
      fft_(px_, py_),
      coupling_(coupling),
      padded_(static_cast<std::size_t>(px_) * static_cast<std::size_t>(py_)),
      spectrum_(fft_.spectrum_size()) {
    if (kernel.empty()) throw ConfigError("nonlocal convolution: empty kernel table");
    AlignedVector<double> re(padded_.size()), im(padded_.size());
    bool has_imag = false;
    for (int j = 0; j < py_; ++j) {
        const double oy = (j < grid.ny ? j : j - py_) * grid.dy;
        for (int i = 0; i < px_; ++i) {
            const double ox = (i < grid.nx ? i : i - px_) * grid.dx;
            const cplx k = kernel(std::hypot(ox, oy));
            re[static_cast<std::size_t>(j) * px_ + i] = k.real();
            im[static_cast<std::size_t>(j) * px_ + i] = k.imag();
            has_imag = has_imag || k.imag() != 0.0;
        }
    }
    const double cell = grid.dx * grid.dy;
    fft_.forward(re, spectrum_);
    re_spectrum_.assign(spectrum_.begin(), spectrum_.end());
    for (auto& v : re_spectrum_) v *= cell;
    if (has_imag) {
        fft_.forward(im, spectrum_);
        im_spectrum_.assign(spectrum_.begin(), spectrum_.end());
        for (auto& v : im_spectrum_) v *= cell;
        spectrum_im_.resize(fft_.spectrum_size());
        result_im_.resize(padded_.size());
    }
}

void NonlocalConvolver::apply(std::span<const double> intensity, std::span<cplx> out) const {
    const std::size_t n = grid_.size();
    if (intensity.size() != n || out.size() != n) {
        throw ConfigError("nonlocal convolution: field does not match the rasterized grid");
    }
    std::fill(padded_.begin(), padded_.end(), 0.0);
    for (int iy = 0; iy < grid_.ny; ++iy) {
        std::copy_n(intensity.begin() + static_cast<std::ptrdiff_t>(iy) * grid_.nx, grid_.nx,
                    padded_.begin() + static_cast<std::ptrdiff_t>(iy) * px_);
    }
    fft_.forward(padded_, spectrum_);
    const bool complex_kernel = !im_spectrum_.empty();
    if (complex_kernel) {
        for (std::size_t k = 0; k < spectrum_.size(); ++k) spectrum_im_[k] = spectrum_[k] * im_spectrum_[k];
        fft_.inverse(spectrum_im_, result_im_);
    }
    for (std::size_t k = 0; k < spectrum_.size(); ++k) spectrum_[k] *= re_spectrum_[k];
    fft_.inverse(spectrum_, padded_);
    for (int iy = 0; iy < grid_.ny; ++iy) {
        for (int ix = 0; ix < grid_.nx; ++ix) {
            const std::size_t p = static_cast<std::size_t>(iy) * px_ + ix;
            const cplx v(padded_[p], complex_kernel ? result_im_[p] : 0.0);
            out[static_cast<std::size_t>(iy) * grid_.nx + ix] = coupling_ * v;
        }
    }
}

std::vector<cplx> nonlocal_phase(const ComplexField& field, const KernelTable& kernel, const PhysicalParams& p) {
    const DerivedParams d = derive(p);
    NonlocalConvolver conv(field.grid, kernel, d.kappa * p.n_a);
    std::vector<double> intensity(field.amplitude.size());
    for (std::size_t i = 0; i < intensity.size(); ++i) intensity[i] = std::norm(field.amplitude[i]);
    std::vector<cplx> out(intensity.size());
    conv.apply(intensity, out);
    return out;
}

Propagator::Propagator(const Grid& grid, const PhysicalParams& p, const PropagationConfig& cfg)
    : grid_(grid),
      params_(p),
      derived_(derive(p)),
      cfg_(cfg),
      dz_(cfg.dz > 0.0 ? cfg.dz : derived_.l_diff / 200.0),
      fft_(grid.nx, grid.ny),
      k2_(grid.size()),
      intensity_(grid.size()),
      phi_(grid.size()) {
    grid.validate();
    cfg.validate(derived_);
    // The table's tail rule covers any radius, but it is only accurate well
    // past the interaction knee.
    const double diag = std::hypot(grid.extent_x(), grid.extent_y());
    if (cfg.kernel->r_max() < std::min(diag, 10.0 * derived_.r_b)) {
        std::ostringstream os;
        os << "kernel table r_max = " << cfg.kernel->r_max() << " um is below min(grid diagonal "
           << diag << ", 10 R_b = " << 10.0 * derived_.r_b << ") um";
        throw ConfigError(os.str());
    }
    convolver_ = std::make_unique<NonlocalConvolver>(grid, *cfg.kernel, derived_.kappa * p.n_a);

    for (int iy = 0; iy < grid.ny; ++iy) {
        const double ky = fft_wavenumber(iy, grid.ny, grid.dy);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double kx = fft_wavenumber(ix, grid.nx, grid.dx);
            k2_[grid.index(ix, iy)] = kx * kx + ky * ky;
        }
    }
    if (cfg.absorber.enabled) {
        absorber_.resize(grid.size());
        const double wx = cfg.absorber.width_fraction * grid.extent_x();
        const double wy = cfg.absorber.width_fraction * grid.extent_y();
        for (int iy = 0; iy < grid.ny; ++iy) {
            const double gy = edge_profile(grid.y(iy), 0.5 * grid.extent_y(), wy);
            for (int ix = 0; ix < grid.nx; ++ix) {
                const double gx = edge_profile(grid.x(ix), 0.5 * grid.extent_x(), wx);
                absorber_[grid.index(ix, iy)] = std::max(gx, gy);
            }
        }
    }
    if (cfg.mode == PropagationMode::full) {
        linear_term_ = derived_.kappa * linear_coefficient(p);
        kerr_term_ = derived_.kappa * local_kerr_coefficient(p);
    }
    intensity_dependent_gain_ = convolver_->complex_kernel() || kerr_term_.imag() != 0.0;
}

void Propagator::linear_step(std::span<cplx> data, double length) const {
    PhaseCache* cache = nullptr;
    for (auto& c : linear_cache_) {
        if (c.length == length) cache = &c;
    }
    if (cache == nullptr) {
        // Replace the slot not used most recently; alternating half and full
        // lengths then never evict each other.
        cache = &linear_cache_[0];
        std::swap(linear_cache_[0], linear_cache_[1]);
        cache->length = length;
        cache->factors.resize(k2_.size());
        const double c = -length / (2.0 * derived_.k_p);
        for (std::size_t i = 0; i < k2_.size(); ++i) cache->factors[i] = std::polar(1.0, c * k2_[i]);
    }
    fft_.forward(data);
    const std::vector<cplx>& f = cache->factors;
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= f[i];
    fft_.inverse(data);
}

std::vector<cplx> Propagator::potential(const ComplexField& field) const {
    std::vector<double> intensity(field.amplitude.size());
    for (std::size_t i = 0; i < intensity.size(); ++i) intensity[i] = std::norm(field.amplitude[i]);
    std::vector<cplx> phi(intensity.size());
    convolver_->apply(intensity, phi);
    if (cfg_.mode == PropagationMode::full) {
        for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += linear_term_ + kerr_term_ * intensity[i];
    }
    return phi;
}

void Propagator::nonlinear_step(std::span<cplx> u, double dz) const {
    for (std::size_t i = 0; i < u.size(); ++i) intensity_[i] = std::norm(u[i]);
    convolver_->apply(intensity_, phi_);
    const bool full = cfg_.mode == PropagationMode::full;
    const bool absorb = !absorber_.empty();
    if (absorb && absorber_dz_ != dz) {
        damping_.resize(absorber_.size());
        const double c = -cfg_.absorber.strength * dz;
        for (std::size_t i = 0; i < absorber_.size(); ++i) damping_[i] = std::exp(c * absorber_[i]);
        absorber_dz_ = dz;
    }
    if (intensity_dependent_gain_) {
        // With gain or loss |U| changes during the step, so freezing the
        // intensity at the start is only first order. Re-evaluate Phi at the
        // midpoint intensity instead.
        for (std::size_t i = 0; i < u.size(); ++i) {
            cplx phi = phi_[i];
            if (full) phi += linear_term_ + kerr_term_ * intensity_[i];
            intensity_[i] *= std::exp(-dz * phi.imag()) * (absorb ? damping_[i] : 1.0);
        }
        convolver_->apply(intensity_, phi_);
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        cplx phi = phi_[i];
        if (full) phi += linear_term_ + kerr_term_ * intensity_[i];
        const double a = dz * phi.real();
        double gain = phi.imag() == 0.0 ? 1.0 : std::exp(-dz * phi.imag());
        if (absorb) gain *= damping_[i];
        u[i] *= gain * cplx(std::cos(a), std::sin(a));
    }
}

void Propagator::check_finite(const ComplexField& field) const {
    for (const cplx& v : field.amplitude) {
        if (!std::isfinite(std::norm(v))) {
            std::ostringstream os;
            os << "field diverged at z = " << field.z << " um: max |U| is no longer finite";
            throw DivergenceError(os.str(), field.z, std::numeric_limits<double>::infinity());
        }
    }
}

void Propagator::step(ComplexField& field, double dz) const {
    if (!(field.grid == grid_)) throw ConfigError("propagator: field grid differs from the configured grid");
    if (dz <= 0.0) dz = dz_;
    std::span<cplx> u(field.amplitude);
    linear_step(u, 0.5 * dz);
    nonlinear_step(u, dz);
    linear_step(u, 0.5 * dz);
    field.z += dz;
    check_finite(field);
}

void Propagator::advance(ComplexField& field, double distance, const ComplexField& input,
                         std::vector<RunRecord>& records, const RecordCallback& on_record) const {
    if (distance <= 0.0) return;
    if (!(field.grid == grid_)) throw ConfigError("propagator: field grid differs from the configured grid");
    const auto steps = static_cast<long>(std::ceil(distance / dz_ - 1e-9));
    const double h = distance / static_cast<double>(steps);
    const double z_start = field.z;
    std::span<cplx> u(field.amplitude);
    // The closing half diffraction step of one step and the opening half of
    // the next are fused into a single full step between records.
    bool open = false;
    for (long s = 1; s <= steps; ++s) {
        const bool emit = s % cfg_.record_every == 0 || s == steps;
        try {
            if (!open) linear_step(u, 0.5 * h);
            nonlinear_step(u, h);
            linear_step(u, emit ? 0.5 * h : h);
            open = !emit;
            field.z = s == steps ? z_start + distance : z_start + static_cast<double>(s) * h;
            check_finite(field);
        } catch (DivergenceError& e) {
            e.set_partial_records(records);
            throw;
        }
        if (emit) {
            records.push_back(make_record(field, input, params_.omega_p0));
            if (on_record) on_record(records.back(), field);
        }
    }
}

PropagationResult Propagator::propagate(const ComplexField& input, const RecordCallback& on_record) const {
    PropagationResult result{input, {}};
    result.records.push_back(make_record(input, input, params_.omega_p0));
    if (on_record) on_record(result.records.back(), input);
    advance(result.field, cfg_.z_end - input.z, input, result.records, on_record);
    return result;
}

ComplexField step(const ComplexField& field, const PropagationConfig& cfg, const PhysicalParams& p) {
    Propagator prop(field.grid, p, cfg);
    ComplexField out = field;
    prop.step(out);
    return out;
}

PropagationResult propagate(const ComplexField& input, const PropagationConfig& cfg, const PhysicalParams& p,
                            const RecordCallback& on_record) {
    return Propagator(input.grid, p, cfg).propagate(input, on_record);
}

}  // namespace solitonlab
