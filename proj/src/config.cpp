#include "solitonlab/config.hpp"

#include "solitonlab/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace solitonlab {

namespace {

const std::vector<std::string> kPhysicsNames = {
    "lambda_p_um",          "gamma_e_over_2pi_mhz", "gamma_r_over_2pi_khz", "omega_c_over_gamma_e",
    "omega_p0_over_gamma_e", "delta_over_2pi_ghz",  "c6_over_2pi_ghz_um6",  "n_a_um3",
    "r0_um",                "kappa_override",
};

const std::vector<std::string> kSearchNames = {
    "delta_over_2pi_ghz", "n_a_um3", "omega_p0_over_gamma_e", "omega_c_over_gamma_e"};

std::vector<std::string> build_known_keys() {
    std::vector<std::string> keys = {"command", "output.dir", "run.seed", "run.threads"};
    for (const auto& n : kPhysicsNames) keys.push_back("physics." + n);
    for (const char* k : {"grid.n", "grid.extent_um", "beam.l1", "beam.l2", "propagation.mode", "propagation.dz_um",
                          "propagation.z_end_um", "propagation.record_every", "propagation.snapshots_um",
                          "propagation.absorber", "propagation.absorber_width", "propagation.absorber_strength",
                          "kernel.convention", "kernel.real_only", "kernel.samples", "kernel.extent_rb",
                          "kernel.rel_tol", "kernel.cache_dir", "sweep.parameter", "sweep.values",
                          "potentials.delta_min_ghz", "potentials.delta_max_ghz", "potentials.samples",
                          "optimize.z_target_um", "optimize.grid_n", "optimize.extent_um", "optimize.dz_um",
                          "ga.population", "ga.generations", "ga.tournament_size", "ga.crossover_rate",
                          "ga.blend_alpha", "ga.mutation_rate", "ga.mutation_scale", "ga.elitism"}) {
        keys.emplace_back(k);
    }
    for (const auto& n : kSearchNames) keys.push_back("search." + n);
    return keys;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct RawValue {
    std::string text;
    std::string origin;  // "line 4" or "environment variable X"
};

class Reader {
public:
    explicit Reader(std::map<std::string, RawValue> values) : values_(std::move(values)) {}

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigParseError(key, what);
        throw ConfigParseError(key, what + " (" + it->second.origin + ")");
    }

    std::string str(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second.text;
    }

    double real(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        return parse_real(key, values_.at(key).text);
    }

    long long integer(const std::string& key, long long fallback) const {
        if (!has(key)) return fallback;
        const std::string& t = values_.at(key).text;
        long long v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc() || res.ptr != t.data() + t.size()) fail(key, "expected an integer, got '" + t + "'");
        return v;
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const std::string& t = values_.at(key).text;
        std::uint64_t v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
            fail(key, "expected a non-negative integer, got '" + t + "'");
        }
        return v;
    }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        std::string t = values_.at(key).text;
        std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
        if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
        if (t == "false" || t == "no" || t == "off" || t == "0") return false;
        fail(key, "expected true or false, got '" + values_.at(key).text + "'");
    }

    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        if (!has(key)) return out;
        std::stringstream ss(values_.at(key).text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail(key, "empty list element");
            out.push_back(parse_real(key, item));
        }
        return out;
    }

private:
    double parse_real(const std::string& key, const std::string& t) const {
        double v = 0.0;
        const char* first = t.data();
        if (!t.empty() && t[0] == '+') ++first;
        const auto res = std::from_chars(first, t.data() + t.size(), v);
        if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
            fail(key, "expected a finite number, got '" + t + "'");
        }
        return v;
    }

    std::map<std::string, RawValue> values_;
};

bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::string to_string(Command c) {
    switch (c) {
        case Command::run: return "run";
        case Command::sweep: return "sweep";
        case Command::optimize: return "optimize";
        case Command::potentials: return "potentials";
    }
    return "?";
}

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = build_known_keys();
    return keys;
}

std::string env_name(const std::string& key) {
    std::string s = "SOLITONLAB_";
    for (char c : key) s += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

EnvLookup process_environment() {
    return [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (!v) return std::nullopt;
        return std::string(v);
    };
}

void set_physics_input(CyclicInputs& in, const std::string& name, double value) {
    if (name == "lambda_p_um") in.lambda_p_um = value;
    else if (name == "gamma_e_over_2pi_mhz") in.gamma_e_mhz = value;
    else if (name == "gamma_r_over_2pi_khz") in.gamma_r_khz = value;
    else if (name == "omega_c_over_gamma_e") in.omega_c_over_gamma_e = value;
    else if (name == "omega_p0_over_gamma_e") in.omega_p0_over_gamma_e = value;
    else if (name == "delta_over_2pi_ghz") in.delta_ghz = value;
    else if (name == "c6_over_2pi_ghz_um6") in.c6_ghz_um6 = value;
    else if (name == "n_a_um3") in.n_a_um3 = value;
    else if (name == "r0_um") in.r0_um = value;
    else if (name == "kappa_override") in.kappa_override = value;
    else throw ConfigParseError("physics." + name, "unknown physics parameter");
}

RunSpec parse_config(const std::string& text, const EnvLookup& env) {
    const auto& known = known_config_keys();
    auto is_known = [&](const std::string& k) { return std::find(known.begin(), known.end(), k) != known.end(); };

    std::map<std::string, RawValue> raw;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no);
        if (eq == std::string::npos) throw ConfigParseError("", where + ": expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigParseError("", where + ": empty key");
        if (!is_known(key)) throw ConfigParseError(key, "unknown key at " + where);
        if (raw.count(key)) throw ConfigParseError(key, "duplicate key at " + where);
        raw[key] = {value, where};
    }
    if (env) {
        for (const auto& key : known) {
            const std::string name = env_name(key);
            if (auto v = env(name)) raw[key] = {trim(*v), "environment variable " + name};
        }
    }
    const Reader r(std::move(raw));

    // Required keys depend on the command; without one, list them all.
    std::vector<std::string> required = {"command"};
    const std::string command = r.str("command", "");
    if (command != "potentials") {
        required.insert(required.end(), {"beam.l1", "beam.l2"});
        if (command != "optimize") required.push_back("propagation.z_end_um");
    }
    std::vector<std::string> missing;
    for (const auto& k : required) {
        if (!r.has(k)) missing.push_back(k);
    }
    if (!missing.empty()) {
        std::string msg = "missing required keys:";
        for (const auto& k : missing) msg += " " + k;
        throw ConfigParseError("", msg);
    }

    RunSpec spec;
    if (command == "run") spec.command = Command::run;
    else if (command == "sweep") spec.command = Command::sweep;
    else if (command == "optimize") spec.command = Command::optimize;
    else if (command == "potentials") spec.command = Command::potentials;
    else r.fail("command", "expected run, sweep, optimize or potentials, got '" + command + "'");

    spec.output_dir = r.str("output.dir", spec.output_dir);
    if (spec.output_dir.empty()) r.fail("output.dir", "must not be empty");
    spec.seed = r.unsigned_integer("run.seed", spec.seed);
    spec.threads = static_cast<int>(r.integer("run.threads", spec.threads));
    if (spec.threads < 1) r.fail("run.threads", "must be >= 1");

    // Physics, in cyclic units.
    CyclicInputs& in = spec.inputs;
    for (const auto& name : kPhysicsNames) {
        const std::string key = "physics." + name;
        if (r.has(key)) set_physics_input(in, name, r.real(key, 0.0));
    }
    auto positive = [&](const std::string& name, double v) {
        if (!(v > 0.0)) r.fail("physics." + name, "must be > 0");
    };
    positive("lambda_p_um", in.lambda_p_um);
    positive("gamma_e_over_2pi_mhz", in.gamma_e_mhz);
    positive("gamma_r_over_2pi_khz", in.gamma_r_khz);
    positive("omega_c_over_gamma_e", in.omega_c_over_gamma_e);
    positive("n_a_um3", in.n_a_um3);
    positive("r0_um", in.r0_um);
    if (in.kappa_override) positive("kappa_override", *in.kappa_override);
    if (in.omega_p0_over_gamma_e < 0.0) r.fail("physics.omega_p0_over_gamma_e", "must be >= 0");
    if (in.c6_ghz_um6 == 0.0) r.fail("physics.c6_over_2pi_ghz_um6", "must be nonzero");
    spec.params = PhysicalParams::from_cyclic(in);
    spec.params.validate();

    // Beam.
    spec.l1 = static_cast<int>(r.integer("beam.l1", 0));
    spec.l2 = static_cast<int>(r.integer("beam.l2", 0));
    if (std::abs(spec.l1) > 16) r.fail("beam.l1", "|l| must be <= 16");
    if (std::abs(spec.l2) > 16) r.fail("beam.l2", "|l| must be <= 16");

    // Grid.
    const long long n = r.integer("grid.n", 256);
    if (!is_power_of_two(n) || n < 16 || n > 4096) r.fail("grid.n", "must be a power of two in [16, 4096]");
    const int max_l = std::max(std::abs(spec.l1), std::abs(spec.l2));
    spec.grid = Grid::for_beam(spec.params, max_l, static_cast<int>(n));
    if (r.has("grid.extent_um")) {
        const double extent = r.real("grid.extent_um", 0.0);
        if (!(extent > 0.0)) r.fail("grid.extent_um", "must be > 0");
        spec.grid = Grid::square(static_cast<int>(n), extent);
    }

    // Propagation.
    PropagationSettings& prop = spec.propagation;
    const std::string mode = r.str("propagation.mode", "reduced");
    if (mode == "reduced") prop.mode = PropagationMode::reduced;
    else if (mode == "full") prop.mode = PropagationMode::full;
    else r.fail("propagation.mode", "expected reduced or full, got '" + mode + "'");
    prop.dz = r.real("propagation.dz_um", 0.0);
    if (prop.dz < 0.0) r.fail("propagation.dz_um", "must be >= 0 (0 selects l_diff/200)");
    prop.z_end = r.real("propagation.z_end_um", 0.0);
    if (prop.z_end < 0.0) r.fail("propagation.z_end_um", "must be >= 0");
    prop.record_every = static_cast<int>(r.integer("propagation.record_every", 1));
    if (prop.record_every < 1) r.fail("propagation.record_every", "must be >= 1");
    prop.snapshots = r.list("propagation.snapshots_um");
    std::sort(prop.snapshots.begin(), prop.snapshots.end());
    prop.snapshots.erase(std::unique(prop.snapshots.begin(), prop.snapshots.end()), prop.snapshots.end());
    for (double z : prop.snapshots) {
        if (z < 0.0 || z > prop.z_end) r.fail("propagation.snapshots_um", "distances must lie in [0, z_end]");
    }
    prop.absorber.enabled = r.boolean("propagation.absorber", true);
    prop.absorber.width_fraction = r.real("propagation.absorber_width", prop.absorber.width_fraction);
    if (!(prop.absorber.width_fraction > 0.0 && prop.absorber.width_fraction < 0.5)) {
        r.fail("propagation.absorber_width", "must be in (0, 0.5)");
    }
    prop.absorber.strength = r.real("propagation.absorber_strength", prop.absorber.strength);
    if (prop.absorber.strength < 0.0) r.fail("propagation.absorber_strength", "must be >= 0");

    // Kernel.
    KernelSettings& ker = spec.kernel;
    const std::string conv = r.str("kernel.convention", "passive");
    if (conv == "passive") ker.options.convention = KernelConvention::passive;
    else if (conv == "literal") ker.options.convention = KernelConvention::literal;
    else r.fail("kernel.convention", "expected passive or literal, got '" + conv + "'");
    ker.real_only = r.boolean("kernel.real_only", false);
    ker.samples = static_cast<int>(r.integer("kernel.samples", ker.samples));
    if (ker.samples < 16) r.fail("kernel.samples", "must be >= 16");
    ker.extent_rb = r.real("kernel.extent_rb", ker.extent_rb);
    if (!(ker.extent_rb >= 10.0)) r.fail("kernel.extent_rb", "must be >= 10");
    ker.options.rel_tol = r.real("kernel.rel_tol", ker.options.rel_tol);
    if (!(ker.options.rel_tol > 0.0 && ker.options.rel_tol < 1e-2)) r.fail("kernel.rel_tol", "must be in (0, 0.01)");
    ker.cache_dir = r.str("kernel.cache_dir", "");

    // Sweep.
    if (spec.command == Command::sweep) {
        if (!r.has("sweep.parameter")) r.fail("sweep.parameter", "required for the sweep command");
        spec.sweep.parameter = r.str("sweep.parameter", "");
        if (std::find(kPhysicsNames.begin(), kPhysicsNames.end(), spec.sweep.parameter) == kPhysicsNames.end()) {
            r.fail("sweep.parameter", "not a physics parameter: '" + spec.sweep.parameter + "'");
        }
        spec.sweep.values = r.list("sweep.values");
        if (spec.sweep.values.empty()) r.fail("sweep.values", "at least one value required");
        for (double v : spec.sweep.values) {
            CyclicInputs trial = in;
            set_physics_input(trial, spec.sweep.parameter, v);
            try {
                PhysicalParams::from_cyclic(trial).validate();
            } catch (const ValidationError& e) {
                r.fail("sweep.values", std::string("value out of range: ") + e.what());
            }
        }
    }

    // Potentials.
    PotentialSweepSettings& pot = spec.potentials;
    pot.delta_min_ghz = r.real("potentials.delta_min_ghz", pot.delta_min_ghz);
    pot.delta_max_ghz = r.real("potentials.delta_max_ghz", pot.delta_max_ghz);
    pot.samples = static_cast<int>(r.integer("potentials.samples", pot.samples));
    if (pot.samples < 1) r.fail("potentials.samples", "must be >= 1");
    if (pot.delta_max_ghz < pot.delta_min_ghz) r.fail("potentials.delta_max_ghz", "must be >= delta_min_ghz");
    if (spec.command == Command::potentials && !(spec.params.omega_p0 > 0.0)) {
        r.fail("physics.omega_p0_over_gamma_e", "must be > 0 for the potentials command");
    }

    // Optimization.
    OptimizeSettings& opt = spec.optimize;
    opt.z_target = r.real("optimize.z_target_um", opt.z_target);
    if (opt.z_target < 0.0) r.fail("optimize.z_target_um", "must be >= 0");
    opt.grid_n = static_cast<int>(r.integer("optimize.grid_n", opt.grid_n));
    if (!is_power_of_two(opt.grid_n) || opt.grid_n < 16) r.fail("optimize.grid_n", "must be a power of two >= 16");
    opt.extent = r.real("optimize.extent_um", opt.extent);
    if (!(opt.extent > 0.0)) r.fail("optimize.extent_um", "must be > 0");
    opt.dz = r.real("optimize.dz_um", opt.dz);
    if (opt.dz < 0.0) r.fail("optimize.dz_um", "must be >= 0");

    GaConfig& ga = opt.ga;
    ga.population = static_cast<int>(r.integer("ga.population", ga.population));
    ga.generations = static_cast<int>(r.integer("ga.generations", ga.generations));
    ga.tournament_size = static_cast<int>(r.integer("ga.tournament_size", ga.tournament_size));
    ga.crossover_rate = r.real("ga.crossover_rate", ga.crossover_rate);
    ga.blend_alpha = r.real("ga.blend_alpha", ga.blend_alpha);
    ga.mutation_rate = r.real("ga.mutation_rate", ga.mutation_rate);
    ga.mutation_scale = r.real("ga.mutation_scale", ga.mutation_scale);
    ga.elitism = static_cast<int>(r.integer("ga.elitism", ga.elitism));
    ga.seed = spec.seed;
    ga.threads = spec.threads;
    try {
        ga.validate();
    } catch (const ValidationError& e) {
        throw ConfigParseError(e.field(), e.what());
    }

    for (const auto& name : kSearchNames) {
        const std::string key = "search." + name;
        if (!r.has(key)) continue;
        const std::vector<double> b = r.list(key);
        if (b.size() != 2) r.fail(key, "expected 'lower, upper'");
        if (b[0] > b[1]) r.fail(key, "lower bound exceeds upper bound");
        SearchDimension d{};
        if (name == "delta_over_2pi_ghz") {
            d = {SearchParameter::delta, two_pi * b[0] * 1e3, two_pi * b[1] * 1e3};
        } else if (name == "n_a_um3") {
            if (!(b[0] > 0.0)) r.fail(key, "bounds must be > 0");
            d = {SearchParameter::n_a, b[0], b[1]};
        } else if (name == "omega_p0_over_gamma_e") {
            if (b[0] < 0.0) r.fail(key, "bounds must be >= 0");
            d = {SearchParameter::omega_p0, b[0] * spec.params.gamma_e, b[1] * spec.params.gamma_e};
        } else {
            if (!(b[0] > 0.0)) r.fail(key, "bounds must be > 0");
            d = {SearchParameter::omega_c, b[0] * spec.params.gamma_e, b[1] * spec.params.gamma_e};
        }
        opt.space.dimensions.push_back(d);
    }
    if (spec.command == Command::optimize && opt.space.dimensions.empty()) {
        throw ConfigParseError("search", "optimize needs at least one search.* range");
    }
    return spec;
}

RunSpec load_config(const std::string& path, const EnvLookup& env) {
    std::ifstream is(path);
    if (!is) throw ConfigParseError("", "cannot read config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), env);
}

std::string physics_fragment(const PhysicalParams& p) {
    const CyclicInputs in = p.to_cyclic();
    std::string s;
    auto line = [&](const char* name, double v) { s += std::string("physics.") + name + " = " + format_double(v) + "\n"; };
    line("lambda_p_um", in.lambda_p_um);
    line("gamma_e_over_2pi_mhz", in.gamma_e_mhz);
    line("gamma_r_over_2pi_khz", in.gamma_r_khz);
    line("omega_c_over_gamma_e", in.omega_c_over_gamma_e);
    line("omega_p0_over_gamma_e", in.omega_p0_over_gamma_e);
    line("delta_over_2pi_ghz", in.delta_ghz);
    line("c6_over_2pi_ghz_um6", in.c6_ghz_um6);
    line("n_a_um3", in.n_a_um3);
    line("r0_um", in.r0_um);
    if (in.kappa_override) line("kappa_override", *in.kappa_override);
    return s;
}

}  // namespace solitonlab
