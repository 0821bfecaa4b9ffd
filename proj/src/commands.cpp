#include "solitonlab/commands.hpp"

#include "solitonlab/io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace solitonlab {

namespace {

std::string fixed3(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
    return std::string(buf, res.ptr);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_text(const fs::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    return os;
}

void write_snapshot(const fs::path& dir, const ComplexField& f) {
    write_field_file(dir / snapshot_name(f.z), f);
    write_intensity_pgm(dir / image_name(f.z), f);
}

struct SingleOutcome {
    int code = exit_ok;
    RunRecord last;
    std::string message;
};

// One propagation with snapshots and metrics written into `dir`.
SingleOutcome run_single(const RunSpec& spec, const PhysicalParams& p, const fs::path& dir) {
    ensure_dir(dir);
    const PropagationSettings& ps = spec.propagation;
    PropagationConfig cfg;
    cfg.dz = ps.dz;
    cfg.z_end = ps.z_end;
    cfg.mode = ps.mode;
    cfg.record_every = ps.record_every;
    cfg.absorber = ps.absorber;
    cfg.kernel = kernel_for(spec, p, spec.grid);
    const Propagator prop(spec.grid, p, cfg);

    const ComplexField input = make_ofw(spec.grid, p, spec.l1, spec.l2);
    ComplexField field = input;
    std::vector<RunRecord> records{make_record(input, input, p.omega_p0)};

    std::vector<double> stops = ps.snapshots;
    stops.push_back(ps.z_end);
    SingleOutcome out;
    try {
        for (double z : stops) {
            prop.advance(field, z - field.z, input, records);
            if (std::binary_search(ps.snapshots.begin(), ps.snapshots.end(), z)) write_snapshot(dir, field);
        }
    } catch (const DivergenceError& e) {
        write_records_csv(dir / "metrics.csv", e.partial_records());
        out.code = exit_divergence;
        out.message = e.what();
        if (!e.partial_records().empty()) out.last = e.partial_records().back();
        return out;
    }
    write_records_csv(dir / "metrics.csv", records);
    out.last = records.back();
    return out;
}

std::string search_key(SearchParameter s) {
    switch (s) {
        case SearchParameter::delta: return "delta_over_2pi_ghz";
        case SearchParameter::n_a: return "n_a_um3";
        case SearchParameter::omega_p0: return "omega_p0_over_gamma_e";
        case SearchParameter::omega_c: return "omega_c_over_gamma_e";
    }
    return "?";
}

double to_config_units(SearchParameter s, double v, const PhysicalParams& base) {
    switch (s) {
        case SearchParameter::delta: return v / two_pi * 1e-3;
        case SearchParameter::n_a: return v;
        case SearchParameter::omega_p0:
        case SearchParameter::omega_c: return v / base.gamma_e;
    }
    return v;
}

int command_run(const RunSpec& spec, std::ostream& log) {
    const SingleOutcome o = run_single(spec, spec.params, spec.output_dir);
    if (o.code != exit_ok) {
        log << "divergence: " << o.message << '\n';
        return o.code;
    }
    log << "z = " << o.last.z << " um, J = " << o.last.j << ", power = " << o.last.power << '\n';
    return exit_ok;
}

int command_sweep(const RunSpec& spec, std::ostream& log) {
    const fs::path root(spec.output_dir);
    ensure_dir(root);
    const std::size_t n = spec.sweep.values.size();
    std::vector<SingleOutcome> outcomes(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;

    auto dir_of = [&](std::size_t i) {
        std::string name = std::to_string(i);
        name.insert(0, name.size() < 3 ? 3 - name.size() : 0, '0');
        return root / ("scenario_" + name);
    };
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            CyclicInputs in = spec.inputs;
            set_physics_input(in, spec.sweep.parameter, spec.sweep.values[i]);
            try {
                outcomes[i] = run_single(spec, PhysicalParams::from_cyclic(in), dir_of(i));
            } catch (const IoError& e) {
                outcomes[i].code = exit_io;
                errors[i] = e.what();
            }
            const std::lock_guard lock(log_mutex);
            log << "scenario " << i << " (" << spec.sweep.parameter << " = " << spec.sweep.values[i]
                << "): J = " << outcomes[i].last.j << (outcomes[i].code == exit_ok ? "" : " [failed]") << '\n';
        }
    };
    const int threads = std::max(1, std::min<int>(spec.threads, static_cast<int>(n)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    auto os = open_text(root / "sweep.csv");
    os << "index," << spec.sweep.parameter << ",z_um,J,power,status\n";
    int code = exit_ok;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = outcomes[i];
        const char* status = o.code == exit_ok ? "ok" : o.code == exit_divergence ? "diverged" : "io_error";
        os << i << ',' << format_double(spec.sweep.values[i]) << ',' << format_double(o.last.z) << ','
           << format_double(o.last.j) << ',' << format_double(o.last.power) << ',' << status << '\n';
        if (o.code == exit_io) throw IoError(errors[i]);
        if (o.code != exit_ok) code = o.code;
    }
    if (!os) throw IoError("cannot write sweep.csv");
    return code;
}

int command_optimize(const RunSpec& spec, std::ostream& log) {
    const fs::path root(spec.output_dir);
    ensure_dir(root);
    const OptimizeSettings& o = spec.optimize;
    Scenario sc;
    sc.base = spec.params;
    sc.l1 = spec.l1;
    sc.l2 = spec.l2;
    sc.grid = Grid::square(o.grid_n, o.extent);
    sc.z_target = o.z_target;
    sc.dz = o.dz;
    sc.mode = spec.propagation.mode;
    sc.absorber = spec.propagation.absorber;
    sc.kernel = spec.kernel.options;
    sc.real_kernel = spec.kernel.real_only;
    sc.kernel_samples = spec.kernel.samples;
    sc.kernel_extent_rb = spec.kernel.extent_rb;

    const OptimizationResult res = optimize(o.space, o.ga, sc);

    auto os = open_text(root / "history.csv");
    os << "generation,best_J,mean_J,best_ever_J,failures";
    for (const auto& d : o.space.dimensions) os << ',' << search_key(d.parameter);
    os << '\n';
    for (const auto& g : res.history) {
        os << g.generation << ',' << format_double(g.best) << ',' << format_double(g.mean) << ','
           << format_double(g.best_ever) << ',' << g.failures;
        for (std::size_t k = 0; k < g.best_candidate.size(); ++k) {
            const SearchParameter s = o.space.dimensions[k].parameter;
            os << ',' << format_double(to_config_units(s, g.best_candidate[k], spec.params));
        }
        os << '\n';
    }
    if (!os) throw IoError("cannot write history.csv");

    auto frag = open_text(root / "best.conf");
    frag << "# best J = " << format_double(res.best_fitness) << " at z = " << format_double(o.z_target) << " um\n";
    frag << physics_fragment(apply_candidate(spec.params, o.space, res.best));
    if (!frag) throw IoError("cannot write best.conf");

    log << "best J = " << res.best_fitness << " with";
    for (std::size_t k = 0; k < res.best.size(); ++k) {
        const SearchParameter s = o.space.dimensions[k].parameter;
        log << ' ' << search_key(s) << " = " << to_config_units(s, res.best[k], spec.params);
    }
    log << '\n';
    return exit_ok;
}

int command_potentials(const RunSpec& spec, std::ostream& log) {
    const fs::path root(spec.output_dir);
    ensure_dir(root);
    const PotentialSweepSettings& ps = spec.potentials;
    auto os = open_text(root / "potentials.csv");
    os << "delta_over_2pi_ghz,re_k1,im_k1,re_k2,im_k2,re_k3,im_k3\n";
    for (int i = 0; i < ps.samples; ++i) {
        // Interpolating from both ends keeps round values such as 0 exact.
        const int last = ps.samples - 1;
        const double delta_ghz =
            last == 0 ? ps.delta_min_ghz : (ps.delta_min_ghz * (last - i) + ps.delta_max_ghz * i) / last;
        CyclicInputs in = spec.inputs;
        in.delta_ghz = delta_ghz;
        const PotentialStrengths k = potential_strengths(PhysicalParams::from_cyclic(in), spec.kernel.options);
        os << format_double(delta_ghz) << ',' << format_double(k.k1.real()) << ',' << format_double(k.k1.imag())
           << ',' << format_double(k.k2.real()) << ',' << format_double(k.k2.imag()) << ','
           << format_double(k.k3.real()) << ',' << format_double(k.k3.imag()) << '\n';
    }
    if (!os) throw IoError("cannot write potentials.csv");
    log << "wrote " << ps.samples << " rows to " << (root / "potentials.csv").string() << '\n';
    return exit_ok;
}

}  // namespace

std::shared_ptr<const KernelTable> kernel_for(const RunSpec& spec, const PhysicalParams& p, const Grid& grid) {
    const DerivedParams d = derive(p);
    const double diag = std::hypot(grid.extent_x(), grid.extent_y());
    const double r_max = std::max(spec.kernel.extent_rb * d.r_b, diag);
    KernelTable t = spec.kernel.cache_dir.empty()
                        ? build_kernel_table(p, r_max, spec.kernel.samples, spec.kernel.options)
                        : cached_kernel_table(spec.kernel.cache_dir, p, r_max, spec.kernel.samples,
                                              spec.kernel.options);
    if (spec.kernel.real_only) t = t.real_part();
    return std::make_shared<const KernelTable>(std::move(t));
}

std::string banner(const RunSpec& spec) {
    const DerivedParams d = derive(spec.params);
    std::ostringstream os;
    os << "solitonlab " << to_string(spec.command) << ": l_diff = " << d.l_diff << " um, R_b = " << d.r_b
       << " um, delta_EIT = " << d.delta_eit << " rad/us, kappa = " << d.kappa;
    if (spec.command != Command::potentials) {
        os << "\n  beam l1 = " << spec.l1 << ", l2 = " << spec.l2 << (spec.is_ofw() ? " (Ferris wheel)" : "")
           << ", grid " << spec.grid.nx << "x" << spec.grid.ny << " over " << spec.grid.extent_x() << " um";
    }
    return os.str();
}

std::string snapshot_name(double z) { return "snapshot_z" + fixed3(z) + "um.bin"; }
std::string image_name(double z) { return "intensity_z" + fixed3(z) + "um.pgm"; }

int run_command(const RunSpec& spec, std::ostream& log) {
    log << banner(spec) << '\n';
    if (spec.command == Command::run || spec.command == Command::sweep) {
        const double l_diff = derive(spec.params).l_diff;
        if (spec.propagation.dz > l_diff / 50.0) {
            log << "warning: dz = " << spec.propagation.dz << " um exceeds l_diff/50 = " << l_diff / 50.0 << " um\n";
        }
    }
    try {
        switch (spec.command) {
            case Command::run: return command_run(spec, log);
            case Command::sweep: return command_sweep(spec, log);
            case Command::optimize: return command_optimize(spec, log);
            case Command::potentials: return command_potentials(spec, log);
        }
    } catch (const IoError& e) {
        log << "I/O error: " << e.what() << '\n';
        return exit_io;
    } catch (const fs::filesystem_error& e) {
        log << "I/O error: " << e.what() << '\n';
        return exit_io;
    } catch (const OptimizationError& e) {
        log << "optimization aborted: " << e.what() << '\n';
        return exit_divergence;
    }
    return exit_ok;
}

}  // namespace solitonlab
