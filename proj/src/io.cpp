#include "solitonlab/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace solitonlab {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b, 4);
}

void put_f64(std::ostream& os, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b, 8);
}

void read_exact(std::istream& is, char* b, std::size_t n) {
    is.read(b, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n) throw IoError("snapshot: unexpected end of data");
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    read_exact(is, reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    read_exact(is, reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

void write_header(std::ostream& os, SnapshotKind kind) {
    os.write(kSnapshotMagic, sizeof kSnapshotMagic);
    put_u32(os, kSnapshotVersion);
    put_u32(os, static_cast<std::uint32_t>(kind));
}

void read_header(std::istream& is, SnapshotKind expected) {
    char magic[8];
    read_exact(is, magic, 8);
    if (std::memcmp(magic, kSnapshotMagic, 8) != 0) throw IoError("snapshot: bad magic");
    const std::uint32_t version = get_u32(is);
    if (version != kSnapshotVersion) throw IoError("snapshot: unsupported version " + std::to_string(version));
    const std::uint32_t kind = get_u32(is);
    if (kind != static_cast<std::uint32_t>(expected)) throw IoError("snapshot: unexpected payload kind");
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::binary) {
    std::ofstream os(path, mode | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    return os;
}

}  // namespace

void write_field(std::ostream& os, const ComplexField& f) {
    write_header(os, SnapshotKind::field);
    put_u32(os, static_cast<std::uint32_t>(f.grid.nx));
    put_u32(os, static_cast<std::uint32_t>(f.grid.ny));
    put_f64(os, f.grid.dx);
    put_f64(os, f.grid.dy);
    put_f64(os, f.z);
    for (const cplx& v : f.amplitude) {
        put_f64(os, v.real());
        put_f64(os, v.imag());
    }
    if (!os) throw IoError("snapshot: write failed");
}

ComplexField read_field(std::istream& is) {
    read_header(is, SnapshotKind::field);
    Grid g;
    g.nx = static_cast<int>(get_u32(is));
    g.ny = static_cast<int>(get_u32(is));
    g.dx = get_f64(is);
    g.dy = get_f64(is);
    try {
        g.validate();
    } catch (const ValidationError& e) {
        throw IoError(std::string("snapshot: invalid grid: ") + e.what());
    }
    ComplexField f(g, get_f64(is));
    for (cplx& v : f.amplitude) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        v = {re, im};
    }
    return f;
}

void write_field_file(const std::filesystem::path& path, const ComplexField& f) {
    auto os = open_out(path);
    write_field(os, f);
}

ComplexField read_field_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    return read_field(is);
}

void write_kernel_table(std::ostream& os, const KernelTable& t) {
    write_header(os, SnapshotKind::kernel_table);
    put_u32(os, static_cast<std::uint32_t>(t.radii().size()));
    put_f64(os, t.tail_coefficient().real());
    put_f64(os, t.tail_coefficient().imag());
    for (std::size_t i = 0; i < t.radii().size(); ++i) {
        put_f64(os, t.radii()[i]);
        put_f64(os, t.values()[i].real());
        put_f64(os, t.values()[i].imag());
    }
    if (!os) throw IoError("kernel table: write failed");
}

KernelTable read_kernel_table(std::istream& is) {
    read_header(is, SnapshotKind::kernel_table);
    const std::uint32_t n = get_u32(is);
    const double tr = get_f64(is);
    const double ti = get_f64(is);
    std::vector<double> radii(n);
    std::vector<cplx> values(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        radii[i] = get_f64(is);
        const double re = get_f64(is);
        const double im = get_f64(is);
        values[i] = {re, im};
    }
    try {
        return KernelTable(std::move(radii), std::move(values), {tr, ti});
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("kernel table: ") + e.what());
    }
}

void write_intensity_pgm(const std::filesystem::path& path, const ComplexField& f) {
    const Grid& g = f.grid;
    double peak = 0.0;
    for (const cplx& v : f.amplitude) peak = std::max(peak, std::norm(v));
    auto os = open_out(path);
    os << "P5\n" << g.nx << ' ' << g.ny << "\n65535\n";
    std::vector<char> row(static_cast<std::size_t>(g.nx) * 2);
    for (int iy = g.ny - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            const double level = peak > 0.0 ? std::norm(f.at(ix, iy)) / peak : 0.0;
            const auto q = static_cast<std::uint16_t>(std::lround(std::clamp(level, 0.0, 1.0) * 65535.0));
            row[2 * static_cast<std::size_t>(ix)] = static_cast<char>(q >> 8);
            row[2 * static_cast<std::size_t>(ix) + 1] = static_cast<char>(q & 0xff);
        }
        os.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!os) throw IoError("cannot write " + path.string());
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_header_records() { return "z_um,J,power,peak_over_Ip0,rms_radius_um\n"; }

std::string csv_row(const RunRecord& r) {
    std::string s;
    s += format_double(r.z) + ',';
    s += format_double(r.j) + ',';
    s += format_double(r.power) + ',';
    s += format_double(r.peak_intensity) + ',';
    s += format_double(r.rms_radius) + '\n';
    return s;
}

void write_records_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
    auto os = open_out(path);
    os << csv_header_records();
    for (const auto& r : records) os << csv_row(r);
    if (!os) throw IoError("cannot write " + path.string());
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

KernelTable cached_kernel_table(const std::filesystem::path& dir, const PhysicalParams& p, double r_max,
                                int n_samples, const KernelOptions& opts) {
    const double key_values[] = {p.gamma_e, p.gamma_r, p.omega_c, p.delta, p.c6, r_max,
                                 static_cast<double>(n_samples), opts.rel_tol,
                                 static_cast<double>(static_cast<int>(opts.convention))};
    const std::uint64_t key = fnv1a(key_values, sizeof key_values);
    std::ostringstream name;
    name << "kernel_" << std::hex << std::setw(16) << std::setfill('0') << key << ".bin";
    const std::filesystem::path path = dir / name.str();
    if (std::filesystem::exists(path)) {
        std::ifstream is(path, std::ios::binary);
        if (is) return read_kernel_table(is);
    }
    KernelTable t = build_kernel_table(p, r_max, n_samples, opts);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    auto os = open_out(path);
    write_kernel_table(os, t);
    return t;
}

}  // namespace solitonlab
