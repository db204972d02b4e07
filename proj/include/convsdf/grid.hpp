#ifndef CONVSDF_GRID_HPP
#define CONVSDF_GRID_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "convsdf/errors.hpp"

namespace convsdf {

/// World-space coordinate; unused trailing axes are zero.
using Point = std::array<double, 3>;
/// Per-axis node index; unused trailing axes are zero.
using NodeIndex = std::array<std::size_t, 3>;

inline std::string to_string(const Point& p, int dim) {
  std::ostringstream out;
  out.precision(17);
  out << '(';
  for (int d = 0; d < dim; ++d) out << (d ? ", " : "") << p[d];
  out << ')';
  return out.str();
}

/// Axis-aligned regular lattice with a uniform spacing on every axis.
/// Node storage is row-major with the last axis fastest.
class GridSpec {
 public:
  GridSpec(std::vector<double> origin, double spacing, std::vector<std::size_t> counts)
      : dim_(static_cast<int>(origin.size())), spacing_(spacing) {
    if (dim_ < 1 || dim_ > 3) throw ValidationError("grid dimension must be 1, 2 or 3");
    if (counts.size() != origin.size())
      throw ValidationError("grid origin and counts have different dimensions");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
      throw ValidationError("grid spacing must be positive and finite");
    std::size_t total = 1;
    for (int d = 0; d < dim_; ++d) {
      if (!std::isfinite(origin[d])) throw ValidationError("grid origin must be finite");
      if (counts[d] < 2) throw ValidationError("grid needs at least 2 nodes per axis");
      if (total > std::numeric_limits<std::size_t>::max() / counts[d])
        throw ValidationError("grid node count overflows");
      total *= counts[d];
      origin_[d] = origin[d];
      counts_[d] = counts[d];
    }
    for (int d = dim_; d < 3; ++d) counts_[d] = 1;
    size_ = total;
    std::size_t stride = 1;
    for (int d = dim_ - 1; d >= 0; --d) {
      strides_[d] = stride;
      stride *= counts_[d];
    }
  }

  /// Lattice covering [min, max] with the given spacing:
  /// counts = round((max - min) / h) + 1 per axis.
  static GridSpec from_bounds(const std::vector<double>& min, const std::vector<double>& max,
                              double spacing) {
    if (min.size() != max.size()) throw ValidationError("--min and --max differ in dimension");
    if (!(spacing > 0.0)) throw ValidationError("grid spacing must be positive");
    std::vector<std::size_t> counts(min.size());
    for (std::size_t d = 0; d < min.size(); ++d) {
      if (!(max[d] > min[d])) throw ValidationError("grid max must exceed min on every axis");
      double cells = std::round((max[d] - min[d]) / spacing);
      counts[d] = static_cast<std::size_t>(cells) + 1;
    }
    return GridSpec(min, spacing, std::move(counts));
  }

  /// Lattice with the given node counts spanning [min, max]; the spacing
  /// must come out equal on all axes.
  static GridSpec from_counts(const std::vector<double>& min, const std::vector<double>& max,
                              const std::vector<std::size_t>& counts) {
    if (min.size() != max.size() || min.size() != counts.size())
      throw ValidationError("--min, --max and --counts differ in dimension");
    double h = 0.0;
    for (std::size_t d = 0; d < min.size(); ++d) {
      if (counts[d] < 2) throw ValidationError("grid needs at least 2 nodes per axis");
      double hd = (max[d] - min[d]) / static_cast<double>(counts[d] - 1);
      if (d == 0) {
        h = hd;
      } else if (std::abs(hd - h) > 1e-9 * h) {
        throw ValidationError("--counts imply different spacings per axis");
      }
    }
    return GridSpec(min, h, counts);
  }

  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return size_; }
  std::size_t count(int axis) const { return counts_[axis]; }
  double origin(int axis) const { return origin_[axis]; }
  std::vector<std::size_t> counts() const { return {counts_.begin(), counts_.begin() + dim_}; }
  std::vector<double> origins() const { return {origin_.begin(), origin_.begin() + dim_}; }

  std::size_t index(const NodeIndex& node) const {
    return node[0] * strides_[0] + node[1] * strides_[1] + node[2] * strides_[2];
  }

  NodeIndex node(std::size_t linear) const {
    NodeIndex out{0, 0, 0};
    for (int d = dim_ - 1; d >= 0; --d) {
      out[d] = linear % counts_[d];
      linear /= counts_[d];
    }
    return out;
  }

  double coordinate(int axis, std::size_t i) const {
    return origin_[axis] + static_cast<double>(i) * spacing_;
  }

  Point position(const NodeIndex& node) const {
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < dim_; ++d) p[d] = coordinate(d, node[d]);
    return p;
  }

  Point position(std::size_t linear) const { return position(node(linear)); }

  Point max_corner() const {
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < dim_; ++d) p[d] = coordinate(d, counts_[d] - 1);
    return p;
  }

  /// Length of the bounding-box diagonal.
  double diagonal() const {
    double sum = 0.0;
    for (int d = 0; d < dim_; ++d) {
      double len = static_cast<double>(counts_[d] - 1) * spacing_;
      sum += len * len;
    }
    return std::sqrt(sum);
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.dim_ == b.dim_ && a.spacing_ == b.spacing_ && a.origin_ == b.origin_ &&
           a.counts_ == b.counts_;
  }

 private:
  int dim_;
  double spacing_;
  Point origin_{0.0, 0.0, 0.0};
  NodeIndex counts_{1, 1, 1};
  NodeIndex strides_{0, 0, 0};
  std::size_t size_ = 0;
};

/// Values on the nodes of a grid, in the grid's storage order.
template <class T>
class Field {
 public:
  Field(GridSpec grid, std::vector<T> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw ValidationError("field has " + std::to_string(values_.size()) + " values but grid has " +
                            std::to_string(grid_.size()) + " nodes");
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  const T& operator[](std::size_t i) const { return values_[i]; }
  const std::vector<T>& values() const { return values_; }
  std::vector<T> release() && { return std::move(values_); }

 private:
  GridSpec grid_;
  std::vector<T> values_;
};

using ScalarField = Field<double>;

/// One scalar field per spatial axis, all on the same grid.
class VectorField {
 public:
  explicit VectorField(std::vector<ScalarField> components) : components_(std::move(components)) {
    if (components_.empty()) throw ValidationError("vector field needs at least one component");
    const GridSpec& g = components_.front().grid();
    if (static_cast<int>(components_.size()) != g.dim())
      throw ValidationError("vector field needs one component per axis");
    for (const auto& c : components_)
      if (!(c.grid() == g)) throw ValidationError("vector field components disagree on grid");
  }

  const GridSpec& grid() const { return components_.front().grid(); }
  int dim() const { return static_cast<int>(components_.size()); }
  const ScalarField& operator[](int axis) const { return components_[axis]; }
  const std::vector<ScalarField>& components() const { return components_; }

 private:
  std::vector<ScalarField> components_;
};

/// Source points with their nearest grid nodes.
class PointSet {
 public:
  PointSet(int dim, std::vector<Point> points, std::vector<std::size_t> snapped)
      : dim_(dim), points_(std::move(points)), snapped_(std::move(snapped)) {
    if (points_.empty()) throw ValidationError("point set is empty");
    if (points_.size() != snapped_.size())
      throw ValidationError("point set needs one snapped node per point");
    unique_ = snapped_;
    std::sort(unique_.begin(), unique_.end());
    unique_.erase(std::unique(unique_.begin(), unique_.end()), unique_.end());
  }

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<std::size_t>& snapped() const { return snapped_; }
  /// Distinct snapped nodes in increasing order (duplicates collapse).
  const std::vector<std::size_t>& unique_nodes() const { return unique_; }

 private:
  int dim_;
  std::vector<Point> points_;
  std::vector<std::size_t> snapped_;
  std::vector<std::size_t> unique_;
};

/// Nearest node per axis; an exact half-cell tie goes to the lower index.
inline std::size_t snap_coordinate(double x, double origin, double h, std::size_t count) {
  double t = (x - origin) / h;
  double i = std::ceil(t - 0.5);
  if (i < 0.0) i = 0.0;
  double top = static_cast<double>(count - 1);
  if (i > top) i = top;
  return static_cast<std::size_t>(i);
}

/// Maps every point to its nearest grid node. Points outside the grid's
/// bounding box are rejected (a tolerance of 1e-9 h absorbs round-off in
/// coordinates computed as origin + i*h).
inline PointSet snap_points(std::span<const Point> points, const GridSpec& grid) {
  if (points.empty()) throw ValidationError("point set is empty");
  const double h = grid.spacing();
  const double slack = 1e-9 * h;
  std::vector<std::size_t> snapped;
  snapped.reserve(points.size());
  Point hi = grid.max_corner();
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Point& p = points[k];
    NodeIndex node{0, 0, 0};
    for (int d = 0; d < grid.dim(); ++d) {
      double lo = grid.origin(d);
      if (!std::isfinite(p[d]) || p[d] < lo - slack || p[d] > hi[d] + slack)
        throw ValidationError("point " + std::to_string(k) + " " + to_string(p, grid.dim()) +
                              " lies outside the grid bounding box");
      node[d] = snap_coordinate(p[d], lo, h, grid.count(d));
    }
    snapped.push_back(grid.index(node));
  }
  return PointSet(grid.dim(), {points.begin(), points.end()}, std::move(snapped));
}

/// Point set made of grid nodes themselves (no snapping error).
inline PointSet point_set_from_nodes(const GridSpec& grid, std::span<const std::size_t> nodes) {
  std::vector<Point> pts;
  pts.reserve(nodes.size());
  for (std::size_t n : nodes) {
    if (n >= grid.size()) throw ValidationError("node index out of range");
    pts.push_back(grid.position(n));
  }
  return PointSet(grid.dim(), std::move(pts), {nodes.begin(), nodes.end()});
}

/// Closed polyline in the plane; the successor of the last vertex is the first.
class Curve2D {
 public:
  explicit Curve2D(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) throw ValidationError("closed curve needs at least 3 vertices");
    for (std::size_t k = 0; k < vertices_.size(); ++k) {
      const Point& a = vertices_[k];
      const Point& b = vertices_[(k + 1) % vertices_.size()];
      if (a[0] == b[0] && a[1] == b[1])
        throw ValidationError("curve vertices " + std::to_string(k) + " and " +
                              std::to_string((k + 1) % vertices_.size()) + " coincide");
      vertices_[k][2] = 0.0;
    }
  }

  std::size_t size() const { return vertices_.size(); }
  const std::vector<Point>& vertices() const { return vertices_; }
  const Point& operator[](std::size_t k) const { return vertices_[k]; }

  Curve2D reversed() const {
    std::vector<Point> r(vertices_.rbegin(), vertices_.rend());
    return Curve2D(std::move(r));
  }

 private:
  std::vector<Point> vertices_;
};

namespace vec {
inline Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
}  // namespace vec

using Triangle = std::array<Point, 3>;

/// Triangle soup with one representative point (the incenter), unit outward
/// normal and area per triangle.
class Surface3D {
 public:
  Surface3D(std::vector<Triangle> triangles, std::vector<Point> centers, std::vector<Point> normals,
            std::vector<double> areas)
      : triangles_(std::move(triangles)),
        centers_(std::move(centers)),
        normals_(std::move(normals)),
        areas_(std::move(areas)) {
    const std::size_t k = triangles_.size();
    if (k == 0) throw ValidationError("surface has no triangles");
    if (centers_.size() != k || normals_.size() != k || areas_.size() != k)
      throw ValidationError("surface arrays have inconsistent lengths");
    for (std::size_t i = 0; i < k; ++i) {
      if (!(vec::norm(normals_[i]) > 0.0))
        throw ValidationError("triangle " + std::to_string(i) + " has a zero normal");
    }
  }

  std::size_t size() const { return triangles_.size(); }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Point>& centers() const { return centers_; }
  const std::vector<Point>& normals() const { return normals_; }
  const std::vector<double>& areas() const { return areas_; }

 private:
  std::vector<Triangle> triangles_;
  std::vector<Point> centers_;
  std::vector<Point> normals_;
  std::vector<double> areas_;
};

/// Builds per-triangle incenters and unit normals, flipping each normal so
/// that it points away from the origin (dot(center, normal) >= 0).
///
/// The orientation rule is only meaningful for surfaces that are star-shaped
/// about the origin; the origin must lie strictly inside the surface.
inline Surface3D triangulate_and_orient(std::span<const Triangle> soup) {
  std::vector<Triangle> tris(soup.begin(), soup.end());
  std::vector<Point> centers, normals;
  std::vector<double> areas;
  centers.reserve(tris.size());
  normals.reserve(tris.size());
  areas.reserve(tris.size());
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const auto& [A, B, C] = tris[i];
    double a = vec::norm(vec::sub(B, C));
    double b = vec::norm(vec::sub(C, A));
    double c = vec::norm(vec::sub(A, B));
    Point n = vec::cross(vec::sub(B, A), vec::sub(C, A));
    double twice_area = vec::norm(n);
    double scale = std::max({a, b, c});
    if (!(twice_area > 1e-12 * scale * scale))
      throw ValidationError("triangle " + std::to_string(i) + " is degenerate (zero area)");
    double perimeter = a + b + c;
    Point center{(a * A[0] + b * B[0] + c * C[0]) / perimeter,
                 (a * A[1] + b * B[1] + c * C[1]) / perimeter,
                 (a * A[2] + b * B[2] + c * C[2]) / perimeter};
    for (double& x : n) x /= twice_area;
    if (vec::dot(center, n) < 0.0)
      for (double& x : n) x = -x;
    centers.push_back(center);
    normals.push_back(n);
    areas.push_back(0.5 * twice_area);
  }
  return Surface3D(std::move(tris), std::move(centers), std::move(normals), std::move(areas));
}

/// Indexed-mesh overload: vertex list plus triangle index triples.
inline Surface3D triangulate_and_orient(std::span<const Point> vertices,
                                        std::span<const std::array<std::size_t, 3>> faces) {
  std::vector<Triangle> soup;
  soup.reserve(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    Triangle t{};
    for (int j = 0; j < 3; ++j) {
      if (faces[f][j] >= vertices.size())
        throw ValidationError("face " + std::to_string(f) + " references a missing vertex");
      t[j] = vertices[faces[f][j]];
    }
    soup.push_back(t);
  }
  return triangulate_and_orient(soup);
}

}  // namespace convsdf

#endif  // CONVSDF_GRID_HPP
