#include "solitonlab/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace solitonlab {

namespace {

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan make_plan(int nx, int ny, int sign) {
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard lock(planner_mutex());
    fftw_plan plan = fftw_plan_dft_2d(ny, nx, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
    return plan;
}

void destroy(void* plan) {
    if (plan == nullptr) return;
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan));
}

}  // namespace

Fft2d::Fft2d(int nx, int ny) : nx_(nx), ny_(ny) {
    if (nx <= 0 || ny <= 0) throw std::invalid_argument("Fft2d: sizes must be positive");
    forward_plan_ = make_plan(nx, ny, FFTW_FORWARD);
    inverse_plan_ = make_plan(nx, ny, FFTW_BACKWARD);
}

Fft2d::~Fft2d() {
    destroy(forward_plan_);
    destroy(inverse_plan_);
}

Fft2d::Fft2d(Fft2d&& other) noexcept
    : nx_(other.nx_),
      ny_(other.ny_),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

Fft2d& Fft2d::operator=(Fft2d&& other) noexcept {
    if (this != &other) {
        destroy(forward_plan_);
        destroy(inverse_plan_);
        nx_ = other.nx_;
        ny_ = other.ny_;
        forward_plan_ = std::exchange(other.forward_plan_, nullptr);
        inverse_plan_ = std::exchange(other.inverse_plan_, nullptr);
    }
    return *this;
}

void Fft2d::forward(std::span<std::complex<double>> data) const {
    if (data.size() != static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_)) {
        throw std::invalid_argument("Fft2d: array size does not match plan");
    }
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), buf, buf);
}

void Fft2d::inverse(std::span<std::complex<double>> data) const {
    if (data.size() != static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_)) {
        throw std::invalid_argument("Fft2d: array size does not match plan");
    }
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), buf, buf);
    const double scale = 1.0 / (static_cast<double>(nx_) * static_cast<double>(ny_));
    for (auto& v : data) v *= scale;
}

void* fft_aligned_alloc(std::size_t bytes) { return fftw_malloc(bytes); }
void fft_aligned_free(void* p) noexcept { fftw_free(p); }

namespace {

void require_aligned(const void* p) {
    if (fftw_alignment_of(static_cast<double*>(const_cast<void*>(p))) != 0) {
        throw std::invalid_argument("RealFft2d: array is not SIMD-aligned; use FftAllocator");
    }
}

}  // namespace

RealFft2d::RealFft2d(int nx, int ny) : nx_(nx), ny_(ny) {
    if (nx <= 0 || ny <= 0) throw std::invalid_argument("RealFft2d: sizes must be positive");
    AlignedVector<double> real(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    AlignedVector<std::complex<double>> spec(spectrum_size());
    auto* c = reinterpret_cast<fftw_complex*>(spec.data());
    std::lock_guard lock(planner_mutex());
    // Planning may overwrite the arrays, which are scratch here.
    forward_plan_ = fftw_plan_dft_r2c_2d(ny, nx, real.data(), c, FFTW_ESTIMATE);
    inverse_plan_ = fftw_plan_dft_c2r_2d(ny, nx, c, real.data(), FFTW_ESTIMATE);
    if (forward_plan_ == nullptr || inverse_plan_ == nullptr) throw std::runtime_error("FFTW planning failed");
}

RealFft2d::~RealFft2d() {
    destroy(forward_plan_);
    destroy(inverse_plan_);
}

void RealFft2d::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
    if (in.size() != static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_) || out.size() != spectrum_size()) {
        throw std::invalid_argument("RealFft2d: array size does not match plan");
    }
    require_aligned(in.data());
    require_aligned(out.data());
    // FFTW does not modify the input of an out-of-place r2c transform.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft2d::inverse(std::span<std::complex<double>> in, std::span<double> out) const {
    if (out.size() != static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_) || in.size() != spectrum_size()) {
        throw std::invalid_argument("RealFft2d: array size does not match plan");
    }
    require_aligned(in.data());
    require_aligned(out.data());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(in.data()),
                         out.data());
    const double scale = 1.0 / (static_cast<double>(nx_) * static_cast<double>(ny_));
    for (auto& v : out) v *= scale;
}

double fft_wavenumber(int i, int n, double d) {
    const int m = (i < (n + 1) / 2) ? i : i - n;
    return 2.0 * std::numbers::pi * m / (n * d);
}

}  // namespace solitonlab
