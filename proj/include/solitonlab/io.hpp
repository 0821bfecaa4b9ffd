#pragma once

#include "solitonlab/field.hpp"
#include "solitonlab/metrics.hpp"
#include "solitonlab/response.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace solitonlab {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Binary snapshot container, little-endian throughout:
//   16-byte header: 8-byte magic, u32 version, u32 payload kind
//   field payload:  u32 nx, u32 ny, f64 dx, f64 dy, f64 z, nx*ny x (f64 re, f64 im)
//   kernel payload: u32 n, f64 tail_re, f64 tail_im, n x (f64 r, f64 re, f64 im)
inline constexpr char kSnapshotMagic[8] = {'S', 'O', 'L', 'I', 'T', 'O', 'N', 'L'};
inline constexpr std::uint32_t kSnapshotVersion = 1;
enum class SnapshotKind : std::uint32_t { field = 1, kernel_table = 2 };

void write_field(std::ostream& os, const ComplexField& f);
ComplexField read_field(std::istream& is);
void write_field_file(const std::filesystem::path& path, const ComplexField& f);
ComplexField read_field_file(const std::filesystem::path& path);

void write_kernel_table(std::ostream& os, const KernelTable& t);
KernelTable read_kernel_table(std::istream& is);

/// 16-bit binary PGM of |U|^2 / max |U|^2, rows from top (largest y) down.
void write_intensity_pgm(const std::filesystem::path& path, const ComplexField& f);

/// Shortest text that reads back to the same double; '.' decimal point,
/// independent of locale.
std::string format_double(double v);

std::string csv_header_records();
std::string csv_row(const RunRecord& r);
void write_records_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);

/// FNV-1a 64-bit hash, used for cache keys.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ULL);

/// Loads a cached kernel table from `dir` or builds and stores it. The key
/// covers the physical parameters that enter the kernel, r_max, n_samples,
/// tolerance and convention.
KernelTable cached_kernel_table(const std::filesystem::path& dir, const PhysicalParams& p, double r_max,
                                int n_samples, const KernelOptions& opts);

}  // namespace solitonlab
