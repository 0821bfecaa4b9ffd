#include <doctest.h>

#include "oracles.hpp"
#include "solitonlab/propagator.hpp"

#include <cmath>
#include <limits>

using namespace solitonlab;

namespace {

const PhysicalParams P = PhysicalParams::reference_sr88();

std::shared_ptr<const KernelTable> zero_kernel() {
    return std::make_shared<const KernelTable>(std::vector<double>{0.0, 1.0e4}, std::vector<cplx>{0.0, 0.0}, 0.0);
}

std::shared_ptr<const KernelTable> reference_kernel(bool real_only, double extent_rb = 50.0) {
    const double r_b = derive(P).r_b;
    KernelTable t = build_kernel_table(P, extent_rb * r_b, 1024);
    return std::make_shared<const KernelTable>(real_only ? t.real_part() : t);
}

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const cplx& x : v) m = std::max(m, std::abs(x));
    return m;
}

double distance(const ComplexField& a, const ComplexField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.amplitude.size(); ++i) s += std::norm(a.amplitude[i] - b.amplitude[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("zero field stays zero") {
    const Grid g = Grid::square(64, 48.0);
    PropagationConfig cfg;
    cfg.kernel = reference_kernel(false);
    cfg.z_end = 10.0;
    ComplexField zero(g);
    const Propagator prop(g, P, cfg);
    for (int s = 0; s < 10; ++s) prop.step(zero);
    CHECK(max_abs(zero.amplitude) == 0.0);
    // Records need a nonzero input.
    CHECK_THROWS_AS(prop.propagate(ComplexField(g)), UndefinedMetricError);
}

TEST_CASE("free Gaussian follows the Fresnel law") {
    const Grid g = Grid::square(256, 240.0);
    PropagationConfig cfg;
    cfg.kernel = zero_kernel();
    cfg.absorber.enabled = false;
    const DerivedParams d = derive(P);
    cfg.z_end = 4.0 * d.l_diff;
    cfg.record_every = 50;
    const ComplexField in = make_vortex(g, P, 0);
    const std::size_t centre = g.index(g.nx / 2, g.ny / 2);
    double worst = 0.0;
    Propagator(g, P, cfg).propagate(in, [&](const RunRecord& rec, const ComplexField& f) {
        const double got = std::norm(f.amplitude[centre]) / (P.omega_p0 * P.omega_p0);
        worst = std::max(worst, std::abs(got - oracle::fresnel_peak(rec.z, d.k_p, P.r0)));
    });
    CHECK(worst < 1e-6);
}

TEST_CASE("uniform field picks up the constant phase exactly") {
    const Grid g = Grid::square(32, 48.0);
    PropagationConfig cfg;
    cfg.kernel = zero_kernel();
    cfg.absorber.enabled = false;
    cfg.mode = PropagationMode::full;
    cfg.z_end = 50.0;
    ComplexField u(g);
    const cplx u0(0.3, -0.1);
    for (auto& v : u.amplitude) v = u0;
    const DerivedParams d = derive(P);
    const cplx phi = d.kappa * linear_coefficient(P) + d.kappa * local_kerr_coefficient(P) * std::norm(u0);
    const PropagationResult r = Propagator(g, P, cfg).propagate(u);
    const cplx expect = u0 * std::exp(cplx(0.0, 1.0) * phi * cfg.z_end);
    for (const cplx& v : r.field.amplitude) CHECK(std::abs(v - expect) < 1e-12 * std::abs(u0));
}

TEST_CASE("point intensity reproduces the sampled kernel") {
    const Grid g = Grid::square(64, 48.0);
    const auto kernel = reference_kernel(false);
    ComplexField u(g);
    u.at(32, 32) = 1.0;
    const std::vector<cplx> phi = nonlocal_phase(u, *kernel, P);
    const DerivedParams d = derive(P);
    const double scale = d.kappa * P.n_a * g.dx * g.dy;
    double peak = 0.0, err = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const cplx expect = scale * (*kernel)(std::hypot(g.x(ix), g.y(iy)));
            peak = std::max(peak, std::abs(expect));
            err = std::max(err, std::abs(phi[g.index(ix, iy)] - expect));
        }
    }
    CHECK(err < 1e-8 * peak);
}

TEST_CASE("spectral convolution equals the direct double sum") {
    const Grid g = Grid::square(64, 48.0);
    const auto kernel = reference_kernel(false);
    std::vector<double> intensity(g.size());
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const double x = g.x(ix) - 1.5, y = g.y(iy) + 0.75;
            intensity[g.index(ix, iy)] = std::exp(-(x * x + 0.5 * y * y) / 9.0);
        }
    }
    NonlocalConvolver conv(g, *kernel, 1.0);
    std::vector<cplx> fast(g.size());
    conv.apply(intensity, fast);
    const auto slow = oracle::direct_convolution(intensity, g.nx, g.ny, g.dx, g.dy, *kernel);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < fast.size(); ++i) {
        err = std::max(err, std::abs(fast[i] - slow[i]));
        ref = std::max(ref, std::abs(slow[i]));
    }
    CHECK(err < 1e-10 * ref);
}

TEST_CASE("power is conserved without gain, loss or absorber") {
    const Grid g = Grid::square(128, 48.0);
    PropagationConfig cfg;
    cfg.kernel = reference_kernel(true);
    cfg.absorber.enabled = false;
    cfg.z_end = 200.0;
    const ComplexField in = make_ofw(g, P, 2, -2);
    const PropagationResult r = Propagator(g, P, cfg).propagate(in);
    CHECK(std::abs(r.field.power() / in.power() - 1.0) < 1e-10);

    cfg.kernel = zero_kernel();
    cfg.dz = 0.05;
    cfg.z_end = 50.0;  // 1000 steps
    const PropagationResult z = Propagator(g, P, cfg).propagate(in);
    CHECK(std::abs(z.field.power() / in.power() - 1.0) < 1e-12);
}

TEST_CASE("Strang splitting converges at second order") {
    const Grid g = Grid::square(128, 48.0);
    PhysicalParams p = P;
    p.kappa_override = 10.0 * derive(P).kappa;
    PropagationConfig cfg;
    cfg.kernel = reference_kernel(true);
    cfg.absorber.enabled = false;
    cfg.z_end = 60.0;
    const ComplexField in = make_ofw(g, p, 2, -2);
    auto run = [&](double dz) {
        cfg.dz = dz;
        return Propagator(g, p, cfg).propagate(in).field;
    };
    const double h = 6.0;
    const ComplexField ref = run(h / 64.0);
    const double e1 = distance(run(h), ref), e2 = distance(run(h / 2.0), ref);
    CAPTURE(e1);
    CAPTURE(e2);
    CHECK(e1 / e2 >= 3.0);
    CHECK(e1 / e2 <= 5.0);
}

TEST_CASE("second order holds with gain and loss in the kernel") {
    const Grid g = Grid::square(64, 48.0);
    PropagationConfig cfg;
    cfg.kernel = reference_kernel(false);
    cfg.absorber.enabled = false;
    cfg.z_end = 20.0;
    const ComplexField in = make_ofw(g, P, 2, -2);
    auto run = [&](double dz) {
        cfg.dz = dz;
        return Propagator(g, P, cfg).propagate(in).field;
    };
    const double h = 1.0;
    const ComplexField ref = run(h / 32.0);
    const double ratio = distance(run(h), ref) / distance(run(h / 2.0), ref);
    CAPTURE(ratio);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

TEST_CASE("rotating the wheel by its symmetry angle commutes with propagation") {
    const Grid g = Grid::square(128, 48.0);
    PropagationConfig cfg;
    cfg.kernel = reference_kernel(false);
    cfg.z_end = 100.0;
    const ComplexField in = make_ofw(g, P, 2, -2);
    // A quarter turn maps node (ix, iy) to (n - iy, ix); row and column 0 fall off.
    ComplexField rotated(g);
    for (int iy = 1; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) rotated.at(g.nx - iy, ix) = in.at(ix, iy);
    }
    const Propagator prop(g, P, cfg);
    const ComplexField a = prop.propagate(in).field;
    const ComplexField b = prop.propagate(rotated).field;
    double err = 0.0, peak = max_abs(a.amplitude);
    for (int iy = 1; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) err = std::max(err, std::abs(b.at(g.nx - iy, ix) - a.at(ix, iy)));
    }
    CHECK(err < 1e-6 * peak);
}

TEST_CASE("reduced and full equations agree for the reference parameters") {
    const Grid g = Grid::square(128, 48.0);
    PropagationConfig cfg;
    cfg.kernel = reference_kernel(false);
    cfg.z_end = 400.0;
    const ComplexField in = make_ofw(g, P, 2, -2);
    const double reduced = Propagator(g, P, cfg).propagate(in).records.back().j;
    cfg.mode = PropagationMode::full;
    const double full = Propagator(g, P, cfg).propagate(in).records.back().j;
    CHECK(std::abs(reduced - full) < 1e-2);
}

TEST_CASE("fused diffraction steps match plain steps") {
    const Grid g = Grid::square(64, 48.0);
    PropagationConfig cfg;
    cfg.kernel = reference_kernel(false);
    cfg.z_end = 30.0;
    cfg.record_every = 1000;
    const ComplexField in = make_ofw(g, P, 2, -2);
    const Propagator prop(g, P, cfg);
    const ComplexField fused = prop.propagate(in).field;
    ComplexField plain = in;
    const long steps = std::lround(std::ceil(cfg.z_end / prop.dz() - 1e-9));
    for (long s = 0; s < steps; ++s) prop.step(plain, cfg.z_end / steps);
    CHECK(distance(fused, plain) < 1e-12 * std::sqrt(in.power() / (g.dx * g.dy)));
    CHECK(fused.z == cfg.z_end);
}

TEST_CASE("records and callback cadence") {
    const Grid g = Grid::square(64, 48.0);
    PropagationConfig cfg;
    cfg.kernel = reference_kernel(false);
    cfg.dz = 1.0;
    cfg.z_end = 10.5;
    cfg.record_every = 4;
    int calls = 0;
    const PropagationResult r =
        Propagator(g, P, cfg).propagate(make_ofw(g, P, 2, -2), [&](const RunRecord&, const ComplexField&) { ++calls; });
    // 11 steps of 10.5/11: initial record, steps 4 and 8, and the final one.
    REQUIRE(r.records.size() == 4);
    CHECK(calls == 4);
    CHECK(r.records.front().z == 0.0);
    CHECK(r.records.front().j == 1.0);
    CHECK(r.records.back().z == 10.5);
    for (const auto& rec : r.records) {
        CHECK(rec.j >= 0.0);
        CHECK(rec.j <= 1.0 + 1e-12);
    }
}

TEST_CASE("non-finite fields raise a divergence error") {
    const Grid g = Grid::square(32, 48.0);
    PropagationConfig cfg;
    cfg.kernel = reference_kernel(false);
    cfg.z_end = 5.0;
    ComplexField u = make_vortex(g, P, 1);
    u.at(3, 3) = cplx(std::numeric_limits<double>::infinity(), 0.0);
    try {
        Propagator(g, P, cfg).propagate(u);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.z() > 0.0);
        CHECK(e.partial_records().size() == 1);
    }
}

TEST_CASE("configuration checks") {
    const Grid g = Grid::square(64, 48.0);
    PropagationConfig cfg;
    CHECK_THROWS_AS(Propagator(g, P, cfg), ValidationError);  // no kernel
    cfg.kernel = std::make_shared<const KernelTable>(build_kernel_table(P, 20.0, 64));
    CHECK_THROWS_AS(Propagator(g, P, cfg), ConfigError);  // table too short
    cfg.kernel = reference_kernel(false);
    cfg.record_every = 0;
    CHECK_THROWS_AS(Propagator(g, P, cfg), ValidationError);
    cfg.record_every = 1;
    const DerivedParams d = derive(P);
    CHECK(cfg.validate(d).empty());
    cfg.dz = d.l_diff / 10.0;
    CHECK_FALSE(cfg.validate(d).empty());
    const ComplexField other(Grid::square(32, 48.0));
    ComplexField copy = other;
    CHECK_THROWS_AS(Propagator(g, P, cfg).step(copy), ConfigError);
}

TEST_CASE("propagation is deterministic") {
    const Grid g = Grid::square(64, 48.0);
    PropagationConfig cfg;
    cfg.kernel = reference_kernel(false);
    cfg.z_end = 40.0;
    const ComplexField in = make_ofw(g, P, 2, -3);
    CHECK(Propagator(g, P, cfg).propagate(in).field == Propagator(g, P, cfg).propagate(in).field);
}
