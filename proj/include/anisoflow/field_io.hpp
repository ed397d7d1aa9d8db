#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include "anisoflow/field.hpp"

// Field dump format:
//   "anisoflow-field v1 scalar n=<n>\n" or "anisoflow-field v1 vector n=<n>\n"
//   followed by little-endian IEEE-754 doubles: the nodal values (x fastest,
//   then y, then z) and then the spectral coefficients as (re, im) pairs in the
//   same order. Storing both forms makes a reload bit-exact. Vector fields
//   store their three components one after another.

namespace anisoflow::io {

namespace detail {

inline void write_le_double(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  os.write(bytes, 8);
}

inline double read_le_double(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) {
    throw std::runtime_error("field dump truncated");
  }
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

inline void write_values(std::ostream& os, const ScalarField& f) {
  for (double v : f.nodal()) write_le_double(os, v);
  for (const auto& c : f.spectral()) {
    write_le_double(os, c.real());
    write_le_double(os, c.imag());
  }
}

inline ScalarField read_values(std::istream& is, Grid grid) {
  std::vector<double> values(grid.size());
  for (auto& v : values) v = read_le_double(is);
  std::vector<Complex> coeffs(grid.size());
  for (auto& c : coeffs) {
    const double re = read_le_double(is);
    c = Complex(re, read_le_double(is));
  }
  return ScalarField::from_parts(grid, std::move(values), std::move(coeffs));
}

}  // namespace detail

inline void write_field(std::ostream& os, const ScalarField& f) {
  os << "anisoflow-field v1 scalar n=" << f.grid().n() << '\n';
  detail::write_values(os, f);
}

inline void write_field(std::ostream& os, const VectorField& u) {
  os << "anisoflow-field v1 vector n=" << u.grid().n() << '\n';
  for (int c = 0; c < 3; ++c) detail::write_values(os, u[c]);
}

using AnyField = std::variant<ScalarField, VectorField>;

inline AnyField read_field(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("missing field header");
  std::istringstream hs(header);
  std::string magic, version, kind, size_token;
  hs >> magic >> version >> kind >> size_token;
  if (magic != "anisoflow-field" || version != "v1") {
    throw std::runtime_error("not an anisoflow-field v1 dump: '" + header + "'");
  }
  if (size_token.rfind("n=", 0) != 0) throw std::runtime_error("bad size token in header");
  const Grid grid(std::stoi(size_token.substr(2)));
  if (kind == "scalar") return detail::read_values(is, grid);
  if (kind == "vector") {
    auto a = detail::read_values(is, grid);
    auto b = detail::read_values(is, grid);
    auto c = detail::read_values(is, grid);
    return VectorField(std::move(a), std::move(b), std::move(c));
  }
  throw std::runtime_error("unknown field kind '" + kind + "'");
}

template <class Field>
void save_field(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_field(os, f);
}

inline AnyField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_field(is);
}

}  // namespace anisoflow::io
