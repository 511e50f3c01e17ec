#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qgp/grid.hpp"
#include "qgp/kernels.hpp"

namespace qgp {

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Binary field dump, little-endian:
//   u32 d, u32 M, f64 L, f64 t, then M^d (re, im) f64 pairs in storage order.
void write_field_dump(const std::filesystem::path& path, const GridSpec& g, double t,
                      const Field& f);
struct FieldDump {
    GridSpec grid;
    double t = 0.0;
    Field values;
};
FieldDump read_field_dump(const std::filesystem::path& path);

// Kernel file: u32 order, u32 rank, u32 d, u32 M, f64 L, then per term the
// coefficient (re, im) followed by order f fields and order g fields, each in
// the field dump's raw data layout.
void write_kernel(const std::filesystem::path& path, const SeparableKernel& k);
SeparableKernel read_kernel(const std::filesystem::path& path);

// CSV with "# key=value" comment headers; floats printed with %.17g so that
// identical (config, seed) runs are byte identical.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header_meta);
    void columns(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);
    static std::string num(double v);
    static std::string num(std::uint64_t v);
    static std::string num(int v);

private:
    std::ofstream out_;
};

std::uint64_t field_checksum(const Field& f);

}  // namespace qgp
