#ifndef CONVSDF_SHAPES_HPP
#define CONVSDF_SHAPES_HPP

// Synthetic test geometry: closed meshes for the degree experiments, smooth
// star-shaped curves standing in for shape silhouettes, and a scanned-looking
// surface point cloud for the 3D distance comparison.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "convsdf/grid.hpp"
#include "convsdf/metrics.hpp"

namespace convsdf::shapes {

/// Axis-aligned cube of half-width `half` centered at the origin, each face
/// split into n x n squares of two triangles.
inline std::vector<Triangle> cube(double half, int n) {
  std::vector<Triangle> out;
  for (int axis = 0; axis < 3; ++axis)
    for (int side : {-1, 1}) {
      int u = (axis + 1) % 3, v = (axis + 2) % 3;
      auto at = [&](int i, int j) {
        Point p{0, 0, 0};
        p[axis] = side * half;
        p[u] = -half + 2.0 * half * i / n;
        p[v] = -half + 2.0 * half * j / n;
        return p;
      };
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          out.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
          out.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
        }
    }
  return out;
}

/// Geodesic sphere: icosahedron refined `levels` times, projected to radius r.
inline std::vector<Triangle> sphere(double r, int levels) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Point> v{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                       {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<std::array<std::size_t, 3>> f{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  auto unit = [](Point p) {
    double n = vec::norm(p);
    return Point{p[0] / n, p[1] / n, p[2] / n};
  };
  for (auto& p : v) p = unit(p);
  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> mid;
    auto midpoint = [&](std::size_t a, std::size_t b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back(unit({v[a][0] + v[b][0], v[a][1] + v[b][1], v[a][2] + v[b][2]}));
      mid.emplace(key, v.size() - 1);
      return v.size() - 1;
    };
    std::vector<std::array<std::size_t, 3>> next;
    for (auto [a, b, c] : f) {
      std::size_t ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  std::vector<Triangle> out;
  for (auto [a, b, c] : f) {
    auto s = [&](std::size_t i) { return Point{r * v[i][0], r * v[i][1], r * v[i][2]}; };
    out.push_back({s(a), s(b), s(c)});
  }
  return out;
}

/// Closed cylinder along z: radius r, height 2*half, `segments` around,
/// `rings` along the side, caps as triangle fans split into `cap_rings`.
inline std::vector<Triangle> cylinder(double r, double half, int segments, int rings, int cap_rings) {
  std::vector<Triangle> out;
  auto rim = [&](int s, double z, double rad) {
    double a = 2.0 * std::numbers::pi * s / segments;
    return Point{rad * std::cos(a), rad * std::sin(a), z};
  };
  for (int k = 0; k < rings; ++k) {
    double z0 = -half + 2.0 * half * k / rings, z1 = -half + 2.0 * half * (k + 1) / rings;
    for (int s = 0; s < segments; ++s) {
      out.push_back({rim(s, z0, r), rim(s + 1, z0, r), rim(s + 1, z1, r)});
      out.push_back({rim(s, z0, r), rim(s + 1, z1, r), rim(s, z1, r)});
    }
  }
  for (double z : {-half, half}) {
    for (int k = 0; k < cap_rings; ++k) {
      double r0 = r * k / cap_rings, r1 = r * (k + 1) / cap_rings;
      for (int s = 0; s < segments; ++s) {
        if (k == 0) {
          out.push_back({Point{0, 0, z}, rim(s, z, r1), rim(s + 1, z, r1)});
        } else {
          out.push_back({rim(s, z, r0), rim(s, z, r1), rim(s + 1, z, r1)});
          out.push_back({rim(s, z, r0), rim(s + 1, z, r1), rim(s + 1, z, r0)});
        }
      }
    }
  }
  return out;
}

/// Smooth star-shaped closed curve around `center`: mean radius r0 with
/// `modes` random Fourier perturbations of decaying amplitude, sampled at
/// roughly `step` arc length and oriented counterclockwise.
inline std::vector<Point> blob_curve(Rng& rng, Point center, double r0, int modes, double step) {
  std::vector<double> amp(modes), phase(modes);
  for (int m = 0; m < modes; ++m) {
    amp[m] = (2.0 * rng.uniform() - 1.0) * 0.25 / (m + 1);
    phase[m] = 2.0 * std::numbers::pi * rng.uniform();
  }
  auto radius = [&](double th) {
    double s = 1.0;
    for (int m = 0; m < modes; ++m) s += amp[m] * std::cos((m + 2) * th + phase[m]);
    return r0 * s;
  };
  const int probe = 4096;
  double perimeter = 0.0;
  for (int i = 0; i < probe; ++i) {
    double a = 2.0 * std::numbers::pi * i / probe, b = 2.0 * std::numbers::pi * (i + 1) / probe;
    perimeter += std::hypot(radius(b) * std::cos(b) - radius(a) * std::cos(a),
                            radius(b) * std::sin(b) - radius(a) * std::sin(a));
  }
  int n = std::max(16, static_cast<int>(std::ceil(perimeter / step)));
  std::vector<Point> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    double th = 2.0 * std::numbers::pi * i / n;
    double rr = radius(th);
    out.push_back({center[0] + rr * std::cos(th), center[1] + rr * std::sin(th), 0.0});
  }
  return out;
}

/// Snaps a curve to grid nodes and drops consecutive repeats (including the
/// wrap-around), giving the node polygon used as both point set and curve.
inline std::vector<Point> snap_curve(const std::vector<Point>& curve, const GridSpec& grid) {
  PointSet ps = snap_points(curve, grid);
  std::vector<std::size_t> nodes;
  for (std::size_t n : ps.snapped())
    if (nodes.empty() || nodes.back() != n) nodes.push_back(n);
  while (nodes.size() > 1 && nodes.front() == nodes.back()) nodes.pop_back();
  std::vector<Point> out;
  out.reserve(nodes.size());
  for (std::size_t n : nodes) out.push_back(grid.position(n));
  return out;
}

/// Even-odd rule for a closed polygon (ray towards +x).
inline bool inside_even_odd(const std::vector<Point>& poly, const Point& x) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a[1] > x[1]) != (b[1] > x[1]) && x[0] < a[0] + (x[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0])) in = !in;
  }
  return in;
}

/// Point cloud on a lumpy closed surface (an ellipsoid with smooth radial
/// bumps plus a tail-like torus section), sampled at about `step` spacing.
/// All points lie inside the box [lo, hi].
inline std::vector<Point> creature_points(Rng& rng, Point lo, Point hi, double step) {
  Point c{0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])};
  Point semi{0.42 * (hi[0] - lo[0]), 0.36 * (hi[1] - lo[1]), 0.32 * (hi[2] - lo[2])};
  std::array<double, 6> amp{}, fu{}, fv{}, ph{};
  for (int j = 0; j < 6; ++j) {
    amp[j] = 0.12 * rng.uniform();
    fu[j] = 1 + static_cast<double>(rng.bounded(4));
    fv[j] = 1 + static_cast<double>(rng.bounded(3));
    ph[j] = 2.0 * std::numbers::pi * rng.uniform();
  }
  auto bump = [&](double u, double v) {
    double s = 1.0;
    for (int j = 0; j < 6; ++j) s += amp[j] * std::cos(fu[j] * u + ph[j]) * std::sin(fv[j] * v);
    return s / (1.0 + amp[0] + amp[1] + amp[2] + amp[3] + amp[4] + amp[5]);
  };
  std::vector<Point> out;
  const double pi = std::numbers::pi;
  double rmax = std::max({semi[0], semi[1], semi[2]});
  int nv = std::max(8, static_cast<int>(std::ceil(pi * rmax / step)));
  for (int i = 1; i < nv; ++i) {
    double v = pi * i / nv;
    double ring = 2.0 * pi * rmax * std::sin(v);
    int nu = std::max(6, static_cast<int>(std::ceil(ring / step)));
    for (int j = 0; j < nu; ++j) {
      double u = 2.0 * pi * (j + 0.5 * (i % 2)) / nu;
      double s = bump(u, v);
      out.push_back({c[0] + s * semi[0] * std::cos(u) * std::sin(v), c[1] + s * semi[1] * std::sin(u) * std::sin(v),
                     c[2] + s * semi[2] * std::cos(v)});
    }
  }
  // tail: quarter torus leaving the body along +x
  double big = 0.3 * (hi[1] - lo[1]), small = 0.06 * (hi[2] - lo[2]);
  Point tc{c[0] + 0.25 * (hi[0] - lo[0]), c[1] - big, c[2]};
  int na = static_cast<int>(std::ceil(0.5 * pi * big / step));
  int nb = std::max(6, static_cast<int>(std::ceil(2.0 * pi * small / step)));
  for (int i = 0; i <= na; ++i) {
    double a = 0.5 * pi * i / na;
    for (int j = 0; j < nb; ++j) {
      double b = 2.0 * pi * j / nb;
      double rr = big + small * std::cos(b);
      out.push_back({tc[0] + rr * std::sin(a), tc[1] + rr * std::cos(a), tc[2] + small * std::sin(b)});
    }
  }
  for (auto& p : out)
    for (int d = 0; d < 3; ++d) p[d] = std::min(std::max(p[d], lo[d]), hi[d]);
  return out;
}

}  // namespace convsdf::shapes

#endif  // CONVSDF_SHAPES_HPP
