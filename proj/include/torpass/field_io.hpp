#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "torpass/errors.hpp"
#include "torpass/grid.hpp"

namespace torpass {

/// Geometry + samples of one field, as stored in an FLD1 file.
struct FieldData {
  std::vector<std::uint32_t> points_per_axis;
  std::vector<double> lengths;
  std::vector<double> values;  // row-major, last axis fastest
};

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "FLD1 I/O assumes a little-endian host");

inline void put_u32(std::ofstream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

inline void put_f64(std::ofstream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), 8);
}

inline std::uint32_t get_u32(std::ifstream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

inline double get_f64(std::ifstream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

}  // namespace detail

inline constexpr char kFldMagic[8] = {'F', 'L', 'D', '1', 0, 0, 0, 0};

/// Write the FLD1 binary format: 8-byte magic "FLD1\0\0\0\0", u32 N,
/// N x u32 per-axis counts, N x f64 per-axis lengths, then row-major f64
/// values. All integers and floats little-endian.
inline void write_fld(const std::string& path, const FieldData& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("write_fld: cannot open " + path);
  os.write(kFldMagic, 8);
  detail::put_u32(os, static_cast<std::uint32_t>(data.points_per_axis.size()));
  for (std::uint32_t c : data.points_per_axis) detail::put_u32(os, c);
  for (double l : data.lengths) detail::put_f64(os, l);
  for (double v : data.values) detail::put_f64(os, v);
  if (!os) throw ConfigError("write_fld: write failed for " + path);
}

inline void write_fld(const std::string& path, const Field& u) {
  FieldData d;
  for (int c : u.grid->points_per_axis)
    d.points_per_axis.push_back(static_cast<std::uint32_t>(c));
  d.lengths = u.grid->lengths;
  d.values = u.values;
  write_fld(path, d);
}

inline FieldData read_fld(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("read_fld: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kFldMagic, 8) != 0)
    throw ConfigError("read_fld: bad magic in " + path);
  const std::uint32_t dim = detail::get_u32(is);
  if (dim == 0 || dim > 16) throw ConfigError("read_fld: bad dimension");
  FieldData d;
  std::size_t count = 1;
  for (std::uint32_t a = 0; a < dim; ++a) {
    const std::uint32_t c = detail::get_u32(is);
    d.points_per_axis.push_back(c);
    count *= c;
  }
  for (std::uint32_t a = 0; a < dim; ++a) d.lengths.push_back(detail::get_f64(is));
  d.values.resize(count);
  is.read(reinterpret_cast<char*>(d.values.data()),
          static_cast<std::streamsize>(count * 8));
  if (!is) throw ConfigError("read_fld: truncated file " + path);
  for (double v : d.values)
    if (!std::isfinite(v)) throw ConfigError("read_fld: non-finite value in " + path);
  return d;
}

/// Load an FLD1 file as a Field on `grid`, verifying the stored geometry.
inline Field load_field(const std::string& path, const ManifoldGrid& grid) {
  FieldData d = read_fld(path);
  if (static_cast<int>(d.points_per_axis.size()) != grid.dim)
    throw ConfigError("load_field: dimension mismatch for " + path);
  for (int a = 0; a < grid.dim; ++a) {
    if (static_cast<int>(d.points_per_axis[a]) != grid.points_per_axis[a])
      throw ConfigError("load_field: grid size mismatch for " + path);
    if (std::abs(d.lengths[a] - grid.lengths[a]) >
        1e-12 * (1.0 + std::abs(grid.lengths[a])))
      throw ConfigError("load_field: torus period mismatch for " + path);
  }
  return make_field(grid, std::move(d.values));
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// CSV export: header "# FLD dims=AxBxC lengths=p,q,r", then one value per
/// line in row-major order.
inline void write_csv(const std::string& path, const Field& u) {
  std::ofstream os(path);
  if (!os) throw ConfigError("write_csv: cannot open " + path);
  os << "# FLD dims=";
  for (int a = 0; a < u.grid->dim; ++a) {
    if (a) os << 'x';
    os << u.grid->points_per_axis[a];
  }
  os << " lengths=";
  for (int a = 0; a < u.grid->dim; ++a) {
    if (a) os << ',';
    os << format_double(u.grid->lengths[a]);
  }
  os << '\n';
  for (double v : u.values) os << format_double(v) << '\n';
  if (!os) throw ConfigError("write_csv: write failed for " + path);
}

}  // namespace torpass
