#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <span>
#include <vector>

namespace solitonlab {

/// In-place 2-D complex FFT over row-major (ny rows of nx) arrays, backed by
/// FFTW with estimate-mode plans so results are bit-reproducible run to run.
/// Plans accept any array of the planned size; execute is thread-safe.
class Fft2d {
public:
    Fft2d(int nx, int ny);
    ~Fft2d();
    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;
    Fft2d(Fft2d&& other) noexcept;
    Fft2d& operator=(Fft2d&& other) noexcept;

    /// Unnormalized forward transform, exponent sign -1.
    void forward(std::span<std::complex<double>> data) const;
    /// Inverse transform including the 1/(nx ny) normalization.
    void inverse(std::span<std::complex<double>> data) const;

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }

private:
    int nx_ = 0, ny_ = 0;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

void* fft_aligned_alloc(std::size_t bytes);
void fft_aligned_free(void* p) noexcept;

/// Allocator returning SIMD-aligned storage, as required by RealFft2d.
template <class T>
struct FftAllocator {
    using value_type = T;
    FftAllocator() = default;
    template <class U>
    FftAllocator(const FftAllocator<U>&) noexcept {}
    T* allocate(std::size_t n) {
        void* p = fft_aligned_alloc(n * sizeof(T));
        if (p == nullptr) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { fft_aligned_free(p); }
    template <class U>
    bool operator==(const FftAllocator<U>&) const noexcept { return true; }
};

template <class T>
using AlignedVector = std::vector<T, FftAllocator<T>>;

/// Real-to-complex 2-D transform pair. The half spectrum holds
/// ny rows of (nx/2 + 1) bins. Arrays must come from FftAllocator; the
/// plans assume aligned data, which roughly halves the cost.
class RealFft2d {
public:
    RealFft2d(int nx, int ny);
    ~RealFft2d();
    RealFft2d(const RealFft2d&) = delete;
    RealFft2d& operator=(const RealFft2d&) = delete;

    std::size_t spectrum_size() const noexcept {
        return static_cast<std::size_t>(nx_ / 2 + 1) * static_cast<std::size_t>(ny_);
    }

    /// Unnormalized forward transform.
    void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
    /// Inverse including 1/(nx ny). Overwrites `in`.
    void inverse(std::span<std::complex<double>> in, std::span<double> out) const;

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }

private:
    int nx_ = 0, ny_ = 0;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// Angular wavenumber of FFT bin i for n samples at spacing d.
double fft_wavenumber(int i, int n, double d);

}  // namespace solitonlab
