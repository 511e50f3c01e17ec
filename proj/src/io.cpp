#include "qgp/io.hpp"

#include <cstdio>
#include <cstring>

#include "qgp/errors.hpp"

namespace qgp {

std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ValidationError("binary read: truncated file");
    return v;
}

void put_field(std::ofstream& out, const Field& f) {
    for (const auto& z : f) {
        put(out, z.real());
        put(out, z.imag());
    }
}

Field get_field(std::ifstream& in, std::size_t n) {
    Field f(n);
    for (auto& z : f) {
        const double re = get<double>(in);
        const double im = get<double>(in);
        z = cplx(re, im);
    }
    return f;
}

}  // namespace

void write_field_dump(const std::filesystem::path& path, const GridSpec& g, double t,
                      const Field& f) {
    if (f.size() != g.size()) throw ValidationError("write_field_dump: size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("write_field_dump: cannot open " + path.string());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.d));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.M));
    put(out, g.L);
    put(out, t);
    put_field(out, f);
}

FieldDump read_field_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("read_field_dump: cannot open " + path.string());
    FieldDump d;
    d.grid.d = static_cast<int>(get<std::uint32_t>(in));
    d.grid.M = static_cast<int>(get<std::uint32_t>(in));
    d.grid.L = get<double>(in);
    d.t = get<double>(in);
    d.grid.validate();
    d.values = get_field(in, d.grid.size());
    return d;
}

void write_kernel(const std::filesystem::path& path, const SeparableKernel& k) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("write_kernel: cannot open " + path.string());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(k.order));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(k.rank()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(k.grid.d));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(k.grid.M));
    put(out, k.grid.L);
    for (const auto& t : k.terms) {
        put(out, t.coeff.real());
        put(out, t.coeff.imag());
        for (const auto& f : t.f) put_field(out, f);
        for (const auto& g : t.g) put_field(out, g);
    }
}

SeparableKernel read_kernel(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("read_kernel: cannot open " + path.string());
    SeparableKernel k;
    k.order = static_cast<int>(get<std::uint32_t>(in));
    const int rank = static_cast<int>(get<std::uint32_t>(in));
    k.grid.d = static_cast<int>(get<std::uint32_t>(in));
    k.grid.M = static_cast<int>(get<std::uint32_t>(in));
    k.grid.L = get<double>(in);
    k.grid.validate();
    if (k.order < 1) throw ValidationError("read_kernel: bad order");
    for (int m = 0; m < rank; ++m) {
        KernelTerm t;
        const double re = get<double>(in);
        const double im = get<double>(in);
        t.coeff = cplx(re, im);
        for (int s = 0; s < k.order; ++s) t.f.push_back(get_field(in, k.grid.size()));
        for (int s = 0; s < k.order; ++s) t.g.push_back(get_field(in, k.grid.size()));
        k.terms.push_back(std::move(t));
    }
    return k;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& header_meta)
    : out_(path) {
    if (!out_) throw ValidationError("CsvWriter: cannot open " + path.string());
    out_ << "# " << header_meta << "\n";
}

void CsvWriter::columns(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << names[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
}

std::string CsvWriter::num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvWriter::num(std::uint64_t v) { return std::to_string(v); }
std::string CsvWriter::num(int v) { return std::to_string(v); }

std::uint64_t field_checksum(const Field& f) {
    return fnv1a64(f.data(), f.size() * sizeof(cplx));
}

}  // namespace qgp
