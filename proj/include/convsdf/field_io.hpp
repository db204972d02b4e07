#ifndef CONVSDF_FIELD_IO_HPP
#define CONVSDF_FIELD_IO_HPP

// EIKFLD01 field files:
//   bytes 0..7   "EIKFLD01"
//   bytes 8..15  header length n, uint64 little-endian
//   next n       UTF-8 JSON header (grid, dtype, name, tau, precision, params)
//   remainder    N float64 values, little-endian, row-major (last axis fastest)

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "convsdf/errors.hpp"
#include "convsdf/grid.hpp"

namespace convsdf {

inline constexpr char kFieldMagic[8] = {'E', 'I', 'K', 'F', 'L', 'D', '0', '1'};

struct FieldFile {
  ScalarField field;
  nlohmann::ordered_json header;
};

namespace detail {

inline std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xff) << (8 * (7 - b));
    return r;
  }
  return v;
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  v = to_le(v);
  out.write(reinterpret_cast<const char*>(&v), 8);
}

inline std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 8)) throw ValidationError("field file truncated");
  return to_le(v);
}

}  // namespace detail

inline nlohmann::ordered_json grid_to_json(const GridSpec& g) {
  return {{"dim", g.dim()}, {"origin", g.origins()}, {"spacing", g.spacing()}, {"counts", g.counts()}};
}

inline GridSpec grid_from_json(const nlohmann::ordered_json& j) {
  try {
    auto origin = j.at("origin").get<std::vector<double>>();
    auto counts = j.at("counts").get<std::vector<std::size_t>>();
    if (j.contains("dim") && j.at("dim").get<std::size_t>() != origin.size())
      throw ValidationError("grid dim does not match origin length");
    return GridSpec(origin, j.at("spacing").get<double>(), counts);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed grid header: ") + e.what());
  }
}

/// Writes `field` with a header holding the grid, dtype and name plus any
/// members of `meta` (tau, precision, creation parameters).
inline void write_field(std::ostream& out, const ScalarField& field, const std::string& name,
                        const nlohmann::ordered_json& meta = nlohmann::ordered_json::object()) {
  nlohmann::ordered_json h;
  h["grid"] = grid_to_json(field.grid());
  h["dtype"] = "float64";
  h["name"] = name;
  for (const auto& [k, v] : meta.items()) h[k] = v;
  std::string text = h.dump();
  out.write(kFieldMagic, 8);
  detail::put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double v : field.values()) detail::put_u64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw std::runtime_error("failed writing field '" + name + "'");
}

inline void write_field(const std::string& path, const ScalarField& field, const std::string& name,
                        const nlohmann::ordered_json& meta = nlohmann::ordered_json::object()) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  write_field(out, field, name, meta);
}

inline FieldFile read_field(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kFieldMagic, 8) != 0)
    throw ValidationError("not an EIKFLD01 field file");
  std::uint64_t n = detail::get_u64(in);
  if (n > (std::uint64_t{1} << 30)) throw ValidationError("field header length is implausible");
  std::string text(n, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(n))) throw ValidationError("field header truncated");
  nlohmann::ordered_json h;
  try {
    h = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("field header is not valid JSON: ") + e.what());
  }
  if (h.value("dtype", "") != "float64") throw ValidationError("field dtype must be float64");
  GridSpec g = grid_from_json(h.at("grid"));
  std::vector<double> v(g.size());
  for (auto& x : v) x = std::bit_cast<double>(detail::get_u64(in));
  if (in.peek() != std::char_traits<char>::eof()) throw ValidationError("field file has trailing bytes");
  return {ScalarField(g, std::move(v)), h};
}

inline FieldFile read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open field file '" + path + "'");
  return read_field(in);
}

/// Header only, for inspection.
inline nlohmann::ordered_json read_field_header(const std::string& path) { return read_field(path).header; }

/// One row per node: coordinates then value.
inline void write_field_csv(std::ostream& out, const ScalarField& field, const std::string& name = "value") {
  static const char* axes[] = {"x", "y", "z"};
  const GridSpec& g = field.grid();
  for (int d = 0; d < g.dim(); ++d) out << axes[d] << ',';
  out << name << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < g.size(); ++i) {
    Point p = g.position(i);
    for (int d = 0; d < g.dim(); ++d) out << p[d] << ',';
    out << field[i] << '\n';
  }
}

/// 0/1 mask, one row per node with integer node indices.
inline void write_mask_csv(std::ostream& out, const Field<std::uint8_t>& mask, const std::string& name = "inside") {
  static const char* axes[] = {"i", "j", "k"};
  const GridSpec& g = mask.grid();
  for (int d = 0; d < g.dim(); ++d) out << axes[d] << ',';
  out << name << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    NodeIndex n = g.node(i);
    for (int d = 0; d < g.dim(); ++d) out << n[d] << ',';
    out << (mask[i] ? 1 : 0) << '\n';
  }
}

}  // namespace convsdf

#endif  // CONVSDF_FIELD_IO_HPP
