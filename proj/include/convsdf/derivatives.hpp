#ifndef CONVSDF_DERIVATIVES_HPP
#define CONVSDF_DERIVATIVES_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "convsdf/bigfloat.hpp"
#include "convsdf/convolution.hpp"
#include "convsdf/distance.hpp"
#include "convsdf/errors.hpp"
#include "convsdf/grid.hpp"

namespace convsdf {

/// Direction cosines X^(d)/|X| per axis and the inverse radius 1/|X| on the
/// kernel offset lattice, all zero at the zero offset.
struct DirectionalKernels {
  std::vector<KernelField<double>> cosines;
  KernelField<double> inverse_radius;
};

inline DirectionalKernels directional_kernels(const GridSpec& grid) {
  const double h = grid.spacing();
  std::vector<KernelField<double>> cosines;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    cosines.push_back(sample_kernel<double>(grid, [&](const Offset& o) {
      auto r2 = RadialTable<double>::r2_of(o);
      return r2 == 0 ? 0.0 : static_cast<double>(o[axis]) / std::sqrt(static_cast<double>(r2));
    }));
  }
  auto inv = sample_kernel<double>(grid, [&](const Offset& o) {
    auto r2 = RadialTable<double>::r2_of(o);
    return r2 == 0 ? 0.0 : 1.0 / (h * std::sqrt(static_cast<double>(r2)));
  });
  return {std::move(cosines), std::move(inv)};
}

/// Gradient of S together with S itself. Source nodes carry the as-written
/// value (their own term contributes nothing) and are listed as untrusted.
struct GradientResult {
  VectorField gradient;
  ScalarField distance;
  std::vector<std::size_t> untrusted;
};

/// Second derivatives of S in 2D plus the first-order quantities they use.
struct HessianResult {
  ScalarField xx, yy, xy;
  VectorField gradient;
  ScalarField distance;
  std::vector<std::size_t> untrusted;
};

namespace detail {

/// Builds a kernel source from fn(table, offset, r2), where the table gives
/// exp(-|X|/tau) and |X| in the backend type.
template <class Real, class Fn>
typename Convolver<Real>::KernelSource radial_source(const GridSpec& grid, const PrecisionConfig& cfg, Fn fn) {
  return [grid, cfg, fn] {
    RadialTable<Real> table(grid, cfg);
    return sample_kernel<Real>(grid, [&](const Offset& o) { return fn(table, o, RadialTable<Real>::r2_of(o)); });
  };
}

// X^(axis)/|X| * exp(-|X|/tau), zero at the origin.
template <class Real>
typename Convolver<Real>::KernelSource cosine_exp(const GridSpec& grid, const PrecisionConfig& cfg, int axis) {
  const double h = grid.spacing();
  return radial_source<Real>(grid, cfg, [axis, h, cfg](RadialTable<Real>& t, const Offset& o, std::size_t r2) {
    Num<Real> num(cfg);
    if (r2 == 0) return num(0.0);
    return t.e(r2) * (static_cast<double>(o[axis]) * h) / t.r(r2);
  });
}

template <class Real>
std::vector<double> to_doubles(const std::vector<Real>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

inline void check_sources(const PointSet& ps, const GridSpec& grid) {
  if (ps.dim() != grid.dim()) throw ValidationError("point set dimension does not match grid");
}

}  // namespace detail

/// S_d = (f_d f * g) / (f * g) for every axis d, where f_d = X^(d)/|X|.
template <class Real>
GradientResult gradient_as(const PointSet& ps, const GridSpec& grid, const PrecisionConfig& cfg) {
  detail::check_sources(ps, grid);
  ScalarField g = impulse_field(ps, grid);
  std::vector<typename Convolver<Real>::KernelSource> kernels;
  kernels.push_back([&] { return kernel_exp<Real>(grid, cfg); });
  for (int axis = 0; axis < grid.dim(); ++axis) kernels.push_back(detail::cosine_exp<Real>(grid, cfg, axis));
  auto conv = Convolver<Real>(grid, cfg).convolve_many(g, kernels);
  const Field<Real>& phi = conv[0];
  detail::require_positive(phi, "phi", cfg);

  std::vector<ScalarField> comps;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = to_double(conv[axis + 1][i] / phi[i]);
    comps.emplace_back(grid, std::move(v));
  }
  return {VectorField(std::move(comps)), s_from_phi(to_extended(phi), cfg), ps.unique_nodes()};
}

inline GradientResult gradient(const PointSet& ps, const GridSpec& grid, const PrecisionConfig& cfg) {
  return dispatch_precision(cfg, [&]<class Real>() { return gradient_as<Real>(ps, grid, cfg); });
}

/// S_xx, S_yy, S_xy on a 2D grid:
///   S_xx = [(-f_c^2/tau + f_s^2 f_r) f * g] / (f * g) + S_x^2 / tau
///   S_yy = [(-f_s^2/tau + f_c^2 f_r) f * g] / (f * g) + S_y^2 / tau
///   S_xy = [-(1/tau + f_r) f_c f_s f * g] / (f * g) + S_x S_y / tau
/// The cancelling 1/tau terms are combined in the backend precision.
template <class Real>
HessianResult hessian_2d_as(const PointSet& ps, const GridSpec& grid, const PrecisionConfig& cfg) {
  if (grid.dim() != 2) throw ValidationError("hessian_2d needs a 2D grid");
  detail::check_sources(ps, grid);
  const double h = grid.spacing();
  const double inv_tau = 1.0 / cfg.tau;
  ScalarField g = impulse_field(ps, grid);

  using Table = RadialTable<Real>;
  auto second = [&](int which) {
    return detail::radial_source<Real>(grid, cfg, [which, h, inv_tau, cfg](Table& t, const Offset& o, std::size_t r2) {
      Num<Real> num(cfg);
      if (r2 == 0) return num(0.0);
      Real fr = num(1.0) / t.r(r2);
      Real c = fr * (static_cast<double>(o[0]) * h);
      Real s = fr * (static_cast<double>(o[1]) * h);
      Real k(num(0.0));
      if (which == 0) k = s * s * fr - c * c * inv_tau;
      if (which == 1) k = c * c * fr - s * s * inv_tau;
      if (which == 2) k = -(c * s * (fr + inv_tau));
      return k * t.e(r2);
    });
  };

  std::vector<typename Convolver<Real>::KernelSource> kernels{
      [&] { return kernel_exp<Real>(grid, cfg); }, detail::cosine_exp<Real>(grid, cfg, 0),
      detail::cosine_exp<Real>(grid, cfg, 1), second(0), second(1), second(2)};
  auto conv = Convolver<Real>(grid, cfg).convolve_many(g, kernels);
  const Field<Real>& phi = conv[0];
  detail::require_positive(phi, "phi", cfg);

  const std::size_t n = grid.size();
  std::vector<double> sx(n), sy(n), sxx(n), syy(n), sxy(n);
  for (std::size_t i = 0; i < n; ++i) {
    Real gx = conv[1][i] / phi[i];
    Real gy = conv[2][i] / phi[i];
    sx[i] = to_double(gx);
    sy[i] = to_double(gy);
    sxx[i] = to_double(conv[3][i] / phi[i] + gx * gx * inv_tau);
    syy[i] = to_double(conv[4][i] / phi[i] + gy * gy * inv_tau);
    sxy[i] = to_double(conv[5][i] / phi[i] + gx * gy * inv_tau);
  }
  std::vector<ScalarField> comps{ScalarField(grid, std::move(sx)), ScalarField(grid, std::move(sy))};
  return {ScalarField(grid, std::move(sxx)),
          ScalarField(grid, std::move(syy)),
          ScalarField(grid, std::move(sxy)),
          VectorField(std::move(comps)),
          s_from_phi(to_extended(phi), cfg),
          ps.unique_nodes()};
}

inline HessianResult hessian_2d(const PointSet& ps, const GridSpec& grid, const PrecisionConfig& cfg) {
  return dispatch_precision(cfg, [&]<class Real>() { return hessian_2d_as<Real>(ps, grid, cfg); });
}

/// Pointwise Euclidean norm of the components.
inline ScalarField gradient_magnitude(const VectorField& v) {
  std::vector<double> m(v.grid().size(), 0.0);
  for (int d = 0; d < v.dim(); ++d)
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += v[d][i] * v[d][i];
  for (double& x : m) x = std::sqrt(x);
  return ScalarField(v.grid(), std::move(m));
}

/// Gaussian and mean curvature of the graph surface z = S(x, y).
struct Curvature {
  ScalarField gaussian;
  ScalarField mean;
};

inline Curvature curvature(const HessianResult& hs) {
  const GridSpec& grid = hs.xx.grid();
  std::vector<double> k(grid.size()), hm(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double px = hs.gradient[0][i], py = hs.gradient[1][i];
    double w = 1.0 + px * px + py * py;
    k[i] = (hs.xx[i] * hs.yy[i] - hs.xy[i] * hs.xy[i]) / (w * w);
    hm[i] = ((1.0 + px * px) * hs.yy[i] - 2.0 * px * py * hs.xy[i] + (1.0 + py * py) * hs.xx[i]) /
            (2.0 * std::pow(w, 1.5));
  }
  return {ScalarField(grid, std::move(k)), ScalarField(grid, std::move(hm))};
}

}  // namespace convsdf

#endif  // CONVSDF_DERIVATIVES_HPP
