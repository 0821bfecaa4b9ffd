#include "solitonlab/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace solitonlab {

double fidelity(const ComplexField& u, const ComplexField& u0) {
    if (!(u.grid == u0.grid)) throw std::invalid_argument("fidelity: fields live on different grids");
    cplx overlap = 0.0;
    double pu = 0.0, pu0 = 0.0;
    for (std::size_t i = 0; i < u.amplitude.size(); ++i) {
        overlap += u.amplitude[i] * std::conj(u0.amplitude[i]);
        pu += std::norm(u.amplitude[i]);
        pu0 += std::norm(u0.amplitude[i]);
    }
    if (!(pu > 0.0) || !(pu0 > 0.0)) throw UndefinedMetricError("fidelity: zero-power field");
    return std::min(1.0, std::norm(overlap) / (pu * pu0));
}

BeamStats beam_stats(const ComplexField& u, double omega_p0) {
    const Grid& g = u.grid;
    double sum = 0.0, moment = 0.0, peak = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) {
        const double y = g.y(iy);
        for (int ix = 0; ix < g.nx; ++ix) {
            const double x = g.x(ix);
            const double w = std::norm(u.at(ix, iy));
            sum += w;
            moment += (x * x + y * y) * w;
            peak = std::max(peak, w);
        }
    }
    if (!(sum > 0.0)) throw UndefinedMetricError("beam_stats: zero field");
    BeamStats s;
    s.power = sum * g.dx * g.dy;
    s.peak_intensity = peak / (omega_p0 * omega_p0);
    s.rms_radius = std::sqrt(moment / sum);
    return s;
}

RunRecord make_record(const ComplexField& u, const ComplexField& u0, double omega_p0) {
    const BeamStats s = beam_stats(u, omega_p0);
    return {u.z, fidelity(u, u0), s.power, s.peak_intensity, s.rms_radius};
}

}  // namespace solitonlab
