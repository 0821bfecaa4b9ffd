#include "solitonlab/commands.hpp"
#include "solitonlab/config.hpp"
#include "solitonlab/io.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace solitonlab;

int main(int argc, char** argv) {
    CLI::App app{"Beam propagation and parameter search in a nonlocal Rydberg medium"};
    std::string command;
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    app.add_option("command", command, "run, sweep, optimize or potentials")
        ->required()
        ->check(CLI::IsMember({"run", "sweep", "optimize", "potentials"}));
    app.add_option("--config", config_path, "configuration file")->required();
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--seed", seed, "random seed (overrides run.seed)");
    app.add_option("--threads", threads, "worker threads (overrides run.threads)")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    RunSpec spec;
    try {
        spec = load_config(config_path, process_environment());
        if (to_string(spec.command) != command) {
            std::cerr << "config error: command: file says '" << to_string(spec.command) << "', command line says '"
                      << command << "'\n";
            return exit_config;
        }
        if (!out_dir.empty()) spec.output_dir = out_dir;
        if (seed) spec.seed = spec.optimize.ga.seed = *seed;
        if (threads) spec.threads = spec.optimize.ga.threads = *threads;
    } catch (const ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        return run_command(spec, std::cout);
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return exit_divergence;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return exit_io;
    }
}
