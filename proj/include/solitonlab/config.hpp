#pragma once

#include "solitonlab/field.hpp"
#include "solitonlab/optimizer.hpp"
#include "solitonlab/propagator.hpp"
#include "solitonlab/response.hpp"
#include "solitonlab/units.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace solitonlab {

enum class Command { run, sweep, optimize, potentials };

std::string to_string(Command c);

/// Raised for anything wrong with a configuration; key() is the dotted path
/// of the offending entry, or empty for file-level problems.
class ConfigParseError : public std::runtime_error {
public:
    ConfigParseError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct KernelSettings {
    KernelOptions options;
    bool real_only = false;     // drop Im(rho32) before propagating
    int samples = 1024;
    double extent_rb = 50.0;    // table r_max in blockade radii
    std::string cache_dir;      // empty: no cache
};

struct PropagationSettings {
    PropagationMode mode = PropagationMode::reduced;
    double dz = 0.0;  // um, <= 0: l_diff / 200
    double z_end = 0.0;
    int record_every = 1;
    std::vector<double> snapshots;  // um, ascending
    AbsorbingBoundary absorber;
};

/// One-parameter scan. Values use the config units of the swept key.
struct SweepSettings {
    std::string parameter;  // a physics.* key name, e.g. "delta_over_2pi_ghz"
    std::vector<double> values;
};

struct PotentialSweepSettings {
    double delta_min_ghz = -3.0;
    double delta_max_ghz = 3.0;
    int samples = 61;
};

struct OptimizeSettings {
    SearchSpace space;
    GaConfig ga;
    double z_target = 5000.0;
    int grid_n = 128;
    double extent = 48.0;
    double dz = 0.0;
};

struct RunSpec {
    Command command = Command::run;
    CyclicInputs inputs;
    PhysicalParams params;
    Grid grid;
    int l1 = 0;
    int l2 = 0;
    PropagationSettings propagation;
    KernelSettings kernel;
    SweepSettings sweep;
    PotentialSweepSettings potentials;
    OptimizeSettings optimize;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;

    /// Opposite winding numbers: an optical Ferris wheel.
    bool is_ofw() const { return l1 != 0 && l1 == -l2; }
};

/// Returns the value of an environment variable, or nullopt.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Environment lookup backed by std::getenv.
EnvLookup process_environment();

/// Name of the variable overriding a key: SOLITONLAB_ + upper-cased path with
/// dots replaced by underscores.
std::string env_name(const std::string& key);

/// Parses `section.key = value` lines. '#' starts a comment. Lists are
/// comma-separated. Overrides from `env` take precedence over the text.
RunSpec parse_config(const std::string& text, const EnvLookup& env = {});
RunSpec load_config(const std::string& path, const EnvLookup& env = {});

/// Every key the parser accepts.
const std::vector<std::string>& known_config_keys();

/// Sets one `physics.<name>` input, e.g. name = "delta_over_2pi_ghz".
/// Throws ConfigParseError for an unknown name.
void set_physics_input(CyclicInputs& in, const std::string& name, double value);

/// `physics.*` lines reproducing the given parameters.
std::string physics_fragment(const PhysicalParams& p);

}  // namespace solitonlab
