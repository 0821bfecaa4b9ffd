#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace solitonlab {

struct QuadratureResult {
    std::complex<double> value;
    double error = 0.0;  // absolute error estimate
    int intervals = 0;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadratureResult partial)
        : std::runtime_error(what), partial_(partial) {}
    const QuadratureResult& partial() const noexcept { return partial_; }

private:
    QuadratureResult partial_;
};

struct QuadratureOptions {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    int max_intervals = 2000;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration of a complex
/// integrand on [a, b]. The interval with the largest error is bisected until
/// error <= max(abs_tol, rel_tol * |value|). Throws QuadratureError carrying
/// the partial estimate when max_intervals is exhausted.
QuadratureResult integrate_adaptive(const std::function<std::complex<double>(double)>& f,
                                    double a, double b, const QuadratureOptions& opts = {});

}  // namespace solitonlab
