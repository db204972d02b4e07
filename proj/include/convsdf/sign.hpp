#ifndef CONVSDF_SIGN_HPP
#define CONVSDF_SIGN_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <numbers>
#include <optional>
#include <vector>

#include "convsdf/bigfloat.hpp"
#include "convsdf/convolution.hpp"
#include "convsdf/errors.hpp"
#include "convsdf/grid.hpp"

namespace convsdf {

using Mask = Field<std::uint8_t>;

/// Winding number or normalized flux per node. Flagged nodes hold a curve
/// vertex or triangle center, where the value is meaningless.
struct SignField {
  ScalarField mu;
  std::vector<std::size_t> flagged;
};

enum class SignMode { winding2d, degree3d };

struct Classification {
  Mask inside;
  Mask low_confidence;
};

namespace detail {

/// Kernel X^(axis) / |X|^power in world units, zero at the origin.
template <class Real>
typename Convolver<Real>::KernelSource power_kernel(const GridSpec& grid, const PrecisionConfig& cfg, int axis,
                                                    int power, double scale) {
  return [grid, cfg, axis, power, scale] {
    using std::sqrt;
    const double h = grid.spacing();
    Num<Real> num(cfg);
    return sample_kernel<Real>(grid, [&](const Offset& o) {
      auto r2 = RadialTable<Real>::r2_of(o);
      if (r2 == 0) return num(0.0);
      // X^(a) / |X|^p with X = o h  ->  o_a / (r2^(p/2)) * h^(1-p)
      Real r = sqrt(num(static_cast<double>(r2)));
      Real denom = num(1.0);
      for (int i = 0; i < power; ++i) denom *= r;
      return num(scale * static_cast<double>(o[axis]) * std::pow(h, 1 - power)) / denom;
    });
  };
}

template <class Real>
ScalarField to_scalar_field(const Field<Real>& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = to_double(f[i]);
  return ScalarField(f.grid(), std::move(v));
}

}  // namespace detail

/// mu = (1/2pi) [ -f_cr * g_2 + f_sr * g_1 ] with f_cr = X^(1)/|X|^2,
/// f_sr = X^(2)/|X|^2 and g_d the tangent components Y_{k+1} - Y_k placed
/// at the snapped vertices. Counterclockwise curves give +1 inside.
template <class Real>
SignField winding_field_as(const Curve2D& curve, const GridSpec& grid, const PrecisionConfig& cfg) {
  if (grid.dim() != 2) throw ValidationError("winding numbers need a 2D grid");
  PointSet ps = snap_points(curve.vertices(), grid);
  const std::size_t k = curve.size();
  std::vector<double> g1(grid.size(), 0.0), g2(grid.size(), 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    Point a = grid.position(ps.snapped()[i]);
    Point b = grid.position(ps.snapped()[(i + 1) % k]);
    g1[ps.snapped()[i]] += b[0] - a[0];
    g2[ps.snapped()[i]] += b[1] - a[1];
  }
  ScalarField f1(grid, std::move(g1)), f2(grid, std::move(g2));
  const double c = 0.5 / std::numbers::pi;
  auto mu = Convolver<Real>(grid, cfg).convolve_sum(
      {{detail::power_kernel<Real>(grid, cfg, 0, 2, -c), &f2}, {detail::power_kernel<Real>(grid, cfg, 1, 2, c), &f1}});
  return {detail::to_scalar_field(mu), ps.unique_nodes()};
}

inline SignField winding_field(const Curve2D& curve, const GridSpec& grid, const PrecisionConfig& cfg) {
  return dispatch_precision(cfg, [&]<class Real>() { return winding_field_as<Real>(curve, grid, cfg); });
}

/// mu = -(1/4pi) sum_d f_d * g_d with f_d = X^(d)/|X|^3 and g_d the
/// area-weighted outward normals placed at the snapped triangle centers.
template <class Real>
SignField degree_field_as(const Surface3D& surface, const GridSpec& grid, const PrecisionConfig& cfg) {
  if (grid.dim() != 3) throw ValidationError("topological degree needs a 3D grid");
  PointSet ps = snap_points(surface.centers(), grid);
  std::vector<std::vector<double>> g(3, std::vector<double>(grid.size(), 0.0));
  for (std::size_t k = 0; k < surface.size(); ++k)
    for (int d = 0; d < 3; ++d) g[d][ps.snapped()[k]] += surface.areas()[k] * surface.normals()[k][d];
  ScalarField f1(grid, std::move(g[0])), f2(grid, std::move(g[1])), f3(grid, std::move(g[2]));
  const double c = -0.25 / std::numbers::pi;
  auto mu = Convolver<Real>(grid, cfg).convolve_sum({{detail::power_kernel<Real>(grid, cfg, 0, 3, c), &f1},
                                                     {detail::power_kernel<Real>(grid, cfg, 1, 3, c), &f2},
                                                     {detail::power_kernel<Real>(grid, cfg, 2, 3, c), &f3}});
  return {detail::to_scalar_field(mu), ps.unique_nodes()};
}

inline SignField degree_field(const Surface3D& surface, const GridSpec& grid, const PrecisionConfig& cfg) {
  return dispatch_precision(cfg, [&]<class Real>() { return degree_field_as<Real>(surface, grid, cfg); });
}

/// Inside/outside per node. Default rule: round(mu) > 0 for winding numbers
/// and round(mu) >= 1 for the degree; a threshold replaces it with
/// mu >= threshold. Flagged nodes copy the label of the nearest unflagged
/// node (breadth-first over axis neighbours) and are marked low-confidence.
inline Classification classify(const ScalarField& mu, const std::vector<std::size_t>& flagged, SignMode mode,
                               std::optional<double> threshold = std::nullopt) {
  const GridSpec& grid = mu.grid();
  const std::size_t n = grid.size();
  std::vector<std::uint8_t> inside(n, 0), low(n, 0);
  for (std::size_t i : flagged) {
    if (i >= n) throw ValidationError("flagged node index out of range");
    low[i] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (low[i]) continue;
    double r = std::round(mu[i]);
    if (threshold) {
      inside[i] = mu[i] >= *threshold;
    } else if (mode == SignMode::winding2d) {
      inside[i] = r > 0.0;
    } else {
      inside[i] = r >= 1.0;
    }
  }
  if (!flagged.empty()) {
    std::deque<std::size_t> queue;
    std::vector<std::uint8_t> done(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (!low[i]) {
        done[i] = 1;
        queue.push_back(i);
      }
    if (queue.empty()) throw ValidationError("every node is flagged; nothing to classify from");
    while (!queue.empty()) {
      std::size_t i = queue.front();
      queue.pop_front();
      NodeIndex node = grid.node(i);
      for (int d = 0; d < grid.dim(); ++d)
        for (int step : {-1, 1}) {
          if ((step < 0 && node[d] == 0) || (step > 0 && node[d] + 1 == grid.count(d))) continue;
          NodeIndex nb = node;
          nb[d] += step;
          std::size_t j = grid.index(nb);
          if (done[j]) continue;
          done[j] = 1;
          inside[j] = inside[i];
          queue.push_back(j);
        }
    }
  }
  return {Mask(grid, std::move(inside)), Mask(grid, std::move(low))};
}

/// +S inside, -S outside.
inline ScalarField signed_distance(const ScalarField& s, const Mask& inside) {
  if (!(s.grid() == inside.grid())) throw ValidationError("distance field and mask are on different grids");
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v[i] = inside[i] ? s[i] : -s[i];
  return ScalarField(s.grid(), std::move(v));
}

}  // namespace convsdf

#endif  // CONVSDF_SIGN_HPP
