#ifndef CONVSDF_GEOMETRY_IO_HPP
#define CONVSDF_GEOMETRY_IO_HPP

// Text input formats:
//   points CSV   one point per line, 2 or 3 numeric fields
//   mesh CSV     one triangle per line, 9 numeric fields
//   OBJ          `v x y z` and `f a b c ...` records (polygons fan-split)
// Blank lines and lines starting with '#' are skipped; a first line that is
// not numeric is treated as a column header.

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "convsdf/errors.hpp"
#include "convsdf/grid.hpp"

namespace convsdf {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

// Splits on commas; false if any field is not a finite number.
inline bool parse_row(std::string_view line, std::vector<double>& out) {
  out.clear();
  while (true) {
    auto comma = line.find(',');
    double v = 0;
    if (!parse_double(line.substr(0, comma), v)) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) return true;
    line.remove_prefix(comma + 1);
  }
}

template <class Fn>
void for_each_csv_row(std::istream& in, const std::string& what, Fn fn) {
  std::string raw;
  std::vector<double> row;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    bool ok = parse_row(line, row);
    if (!ok && first) {
      first = false;
      continue;
    }
    first = false;
    if (!ok) throw ValidationError(what + " line " + std::to_string(lineno) + ": expected numeric fields");
    fn(row, lineno);
  }
}

}  // namespace detail

/// Points with 2 or 3 coordinates; every row must have the same count.
/// `dim` is set to the count found.
inline std::vector<Point> read_points_csv(std::istream& in, int& dim) {
  std::vector<Point> out;
  dim = 0;
  detail::for_each_csv_row(in, "points CSV", [&](const std::vector<double>& row, std::size_t lineno) {
    int n = static_cast<int>(row.size());
    if (n != 2 && n != 3)
      throw ValidationError("points CSV line " + std::to_string(lineno) + ": expected 2 or 3 fields, got " +
                            std::to_string(n));
    if (dim == 0) dim = n;
    if (n != dim)
      throw ValidationError("points CSV line " + std::to_string(lineno) + ": mixed 2D and 3D rows");
    out.push_back({row[0], row[1], n == 3 ? row[2] : 0.0});
  });
  if (out.empty()) throw ValidationError("points CSV has no points");
  return out;
}

inline std::vector<Point> read_points_csv(const std::string& path, int& dim) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open points file '" + path + "'");
  return read_points_csv(in, dim);
}

/// Triangle soup, nine coordinates per row.
inline std::vector<Triangle> read_mesh_csv(std::istream& in) {
  std::vector<Triangle> out;
  detail::for_each_csv_row(in, "mesh CSV", [&](const std::vector<double>& row, std::size_t lineno) {
    if (row.size() != 9)
      throw ValidationError("mesh CSV line " + std::to_string(lineno) + ": expected 9 fields, got " +
                            std::to_string(row.size()));
    out.push_back({Point{row[0], row[1], row[2]}, Point{row[3], row[4], row[5]}, Point{row[6], row[7], row[8]}});
  });
  if (out.empty()) throw ValidationError("mesh CSV has no triangles");
  return out;
}

/// Vertices and faces of a Wavefront OBJ file; texture and normal indices
/// after '/' are ignored, negative indices count from the end.
inline std::vector<Triangle> read_obj(std::istream& in) {
  std::vector<Point> v;
  std::vector<Triangle> out;
  std::string raw;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) { throw ValidationError("OBJ line " + std::to_string(lineno) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> tok;
    while (!line.empty()) {
      auto sp = line.find_first_of(" \t");
      tok.push_back(line.substr(0, sp));
      if (sp == std::string_view::npos) break;
      line = detail::trim(line.substr(sp));
    }
    if (tok[0] == "v") {
      if (tok.size() < 4) fail("vertex needs 3 coordinates");
      Point p{};
      for (int d = 0; d < 3; ++d)
        if (!detail::parse_double(tok[d + 1], p[d])) fail("bad vertex coordinate");
      v.push_back(p);
    } else if (tok[0] == "f") {
      if (tok.size() < 4) fail("face needs at least 3 vertices");
      std::vector<std::size_t> idx;
      for (std::size_t t = 1; t < tok.size(); ++t) {
        auto s = tok[t].substr(0, tok[t].find('/'));
        long i = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), i);
        if (ec != std::errc() || ptr != s.data() + s.size() || i == 0) fail("bad face index");
        long n = static_cast<long>(v.size());
        long k = i > 0 ? i - 1 : n + i;
        if (k < 0 || k >= n) fail("face index out of range");
        idx.push_back(static_cast<std::size_t>(k));
      }
      for (std::size_t t = 1; t + 1 < idx.size(); ++t) out.push_back({v[idx[0]], v[idx[t]], v[idx[t + 1]]});
    }
  }
  if (out.empty()) throw ValidationError("OBJ file has no faces");
  return out;
}

/// Reads a mesh by extension: .obj or CSV otherwise.
inline std::vector<Triangle> read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open mesh file '" + path + "'");
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".obj") == 0) return read_obj(in);
  return read_mesh_csv(in);
}

/// Closed curve vertices from a 2D points CSV.
inline Curve2D read_curve_csv(const std::string& path) {
  int dim = 0;
  auto pts = read_points_csv(path, dim);
  if (dim != 2) throw ValidationError("curve file '" + path + "' must have 2 fields per row");
  return Curve2D(std::move(pts));
}

}  // namespace convsdf

#endif  // CONVSDF_GEOMETRY_IO_HPP
