#pragma once

#include <span>
#include <vector>

namespace solitonlab {

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Preserves monotonicity of the data on every interval and reproduces the
/// samples exactly at the nodes.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::span<const double> x, std::span<const double> y);

    /// Arguments outside [x.front(), x.back()] clamp to the end values.
    double operator()(double x) const;

    /// Exact integral of the interpolant over [x.front(), x.back()].
    double integral() const;

    bool empty() const noexcept { return x_.empty(); }

private:
    std::vector<double> x_, y_, slope_;
};

}  // namespace solitonlab
