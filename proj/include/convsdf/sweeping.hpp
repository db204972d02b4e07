#ifndef CONVSDF_SWEEPING_HPP
#define CONVSDF_SWEEPING_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "convsdf/errors.hpp"
#include "convsdf/grid.hpp"

namespace convsdf {

namespace detail {

// Solves the Godunov upwind discretization of |grad u| = 1 given the
// smaller neighbour value along each axis (entries may be +inf).
inline double godunov_update(double* a, int dim, double h) {
  std::sort(a, a + dim);
  double u = a[0] + h;
  if (dim >= 2 && u > a[1]) {
    double d = a[0] - a[1];
    u = 0.5 * (a[0] + a[1] + std::sqrt(2.0 * h * h - d * d));
    if (dim == 3 && u > a[2]) {
      double s = a[0] + a[1] + a[2];
      double q = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
      u = (s + std::sqrt(s * s - 3.0 * (q - h * h))) / 3.0;
    }
  }
  return u;
}

}  // namespace detail

/// Fast sweeping solution of |grad u| = 1 with u = 0 on the snapped source
/// nodes. One iteration runs all 2^dim axis orderings of Gauss-Seidel
/// updates. Single-threaded and deterministic.
inline ScalarField fast_sweep(const PointSet& ps, const GridSpec& grid, int iterations) {
  if (iterations < 1) throw ValidationError("fast sweeping needs at least one iteration");
  if (ps.dim() != grid.dim()) throw ValidationError("point set dimension does not match grid");
  const int dim = grid.dim();
  const double h = grid.spacing();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(grid.size(), inf);
  std::vector<char> fixed(grid.size(), 0);
  for (std::size_t n : ps.unique_nodes()) {
    u[n] = 0.0;
    fixed[n] = 1;
  }

  NodeIndex counts{grid.count(0), dim > 1 ? grid.count(1) : 1, dim > 2 ? grid.count(2) : 1};
  std::array<std::size_t, 3> stride{0, 0, 0};
  {
    std::size_t s = 1;
    for (int d = dim - 1; d >= 0; --d) {
      stride[d] = s;
      s *= counts[d];
    }
  }

  auto relax = [&](std::size_t i0, std::size_t i1, std::size_t i2) {
    NodeIndex node{i0, i1, i2};
    std::size_t idx = 0;
    for (int d = 0; d < dim; ++d) idx += node[d] * stride[d];
    if (fixed[idx]) return;
    double a[3];
    for (int d = 0; d < dim; ++d) {
      double lo = node[d] > 0 ? u[idx - stride[d]] : inf;
      double hi = node[d] + 1 < counts[d] ? u[idx + stride[d]] : inf;
      a[d] = std::min(lo, hi);
    }
    bool any = false;
    for (int d = 0; d < dim; ++d) any = any || a[d] < inf;
    if (!any) return;
    u[idx] = std::min(u[idx], detail::godunov_update(a, dim, h));
  };

  for (int it = 0; it < iterations; ++it) {
    for (int order = 0; order < (1 << dim); ++order) {
      auto at = [&](int d, std::size_t k) { return (order >> d) & 1 ? counts[d] - 1 - k : k; };
      for (std::size_t k0 = 0; k0 < counts[0]; ++k0)
        for (std::size_t k1 = 0; k1 < counts[1]; ++k1)
          for (std::size_t k2 = 0; k2 < counts[2]; ++k2) relax(at(0, k0), at(1, k1), at(2, k2));
    }
  }
  return ScalarField(grid, std::move(u));
}

}  // namespace convsdf

#endif  // CONVSDF_SWEEPING_HPP
