#pragma once

#include "solitonlab/config.hpp"

#include <iosfwd>
#include <memory>

namespace solitonlab {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_divergence = 3,
    exit_io = 4,
};

/// Kernel table for a run: cached on disk when kernel.cache_dir is set,
/// reduced to its real part when kernel.real_only is set. The table always
/// reaches past the grid diagonal.
std::shared_ptr<const KernelTable> kernel_for(const RunSpec& spec, const PhysicalParams& p, const Grid& grid);

/// Startup banner with the derived scales.
std::string banner(const RunSpec& spec);

/// Snapshot and image names embed z with three decimals, e.g.
/// snapshot_z400.000um.bin and intensity_z400.000um.pgm.
std::string snapshot_name(double z);
std::string image_name(double z);

/// Executes spec.command, writing into spec.output_dir. Progress goes to
/// `log`. Configuration errors thrown by the library propagate; divergence
/// and I/O failures are reported and mapped to their exit codes.
int run_command(const RunSpec& spec, std::ostream& log);

}  // namespace solitonlab
