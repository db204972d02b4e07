#ifndef CONVSDF_DISTANCE_HPP
#define CONVSDF_DISTANCE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "convsdf/bigfloat.hpp"
#include "convsdf/convolution.hpp"
#include "convsdf/errors.hpp"
#include "convsdf/grid.hpp"
#include "convsdf/parallel.hpp"

namespace convsdf {

/// Field of positive values stored as mantissa * 2^exponent, so sums of
/// exponentials far below the double range keep their logarithm.
class ExtendedField {
 public:
  ExtendedField(GridSpec grid, std::vector<double> mantissa, std::vector<long> exponent)
      : grid_(std::move(grid)), mantissa_(std::move(mantissa)), exponent_(std::move(exponent)) {
    if (mantissa_.size() != grid_.size() || exponent_.size() != grid_.size())
      throw ValidationError("extended field size does not match grid");
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return mantissa_.size(); }
  double mantissa(std::size_t i) const { return mantissa_[i]; }
  long exponent(std::size_t i) const { return exponent_[i]; }

  /// Natural logarithm of node i's value.
  double log(std::size_t i) const {
    return std::log(mantissa_[i]) + static_cast<double>(exponent_[i]) * std::numbers::ln2;
  }

  /// Values as plain doubles (underflow to 0 and overflow to inf possible).
  ScalarField to_scalar() const {
    std::vector<double> v(size());
    for (std::size_t i = 0; i < size(); ++i)
      v[i] = std::ldexp(mantissa_[i], static_cast<int>(std::clamp<long>(exponent_[i], -100000, 100000)));
    return ScalarField(grid_, std::move(v));
  }

 private:
  GridSpec grid_;
  std::vector<double> mantissa_;
  std::vector<long> exponent_;
};

inline double frexp_value(double x, long& e) {
  int ei = 0;
  double m = std::frexp(x, &ei);
  e = ei;
  return m;
}
inline double frexp_value(const BigFloat& x, long& e) { return x.frexp(e); }

/// Converts a backend field to the extended representation.
template <class Real>
ExtendedField to_extended(const Field<Real>& f) {
  std::vector<double> m(f.size());
  std::vector<long> e(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) m[i] = frexp_value(f[i], e[i]);
  return ExtendedField(f.grid(), std::move(m), std::move(e));
}

/// exp(-|X|/tau) on the full offset lattice of the grid.
template <class Real>
KernelField<Real> kernel_exp(const GridSpec& grid, const PrecisionConfig& cfg) {
  cfg.validate();
  RadialTable<Real> table(grid, cfg);
  return sample_kernel<Real>(grid, [&](const Offset& o) { return table.e(RadialTable<Real>::r2_of(o)); });
}

/// Kronecker impulses: 1 on every distinct snapped source node, 0 elsewhere.
inline ScalarField impulse_field(const PointSet& ps, const GridSpec& grid) {
  if (ps.dim() != grid.dim()) throw ValidationError("point set dimension does not match grid");
  std::vector<double> g(grid.size(), 0.0);
  for (std::size_t n : ps.unique_nodes()) {
    if (n >= grid.size()) throw ValidationError("snapped node index " + std::to_string(n) + " out of range");
    g[n] = 1.0;
  }
  return ScalarField(grid, std::move(g));
}

namespace detail {
template <class Real>
void require_positive(const Field<Real>& phi, const char* what, const PrecisionConfig& cfg) {
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (sign_of(phi[i]) <= 0 || !is_finite(phi[i]))
      throw PrecisionError(std::string(what) + " is not positive at node " + std::to_string(i) + " with precision " +
                           cfg.label() + " and tau " + std::to_string(cfg.tau) +
                           "; increase the precision (big:<bits>) or tau");
  }
}
}  // namespace detail

/// phi = f * g evaluated with the FFT engine in the configured precision.
template <class Real>
Field<Real> phi_fft_raw(const PointSet& ps, const GridSpec& grid, const PrecisionConfig& cfg) {
  ScalarField g = impulse_field(ps, grid);
  Convolver<Real> conv(grid, cfg);
  Field<Real> phi = conv.convolve_many(g, {[&] { return kernel_exp<Real>(grid, cfg); }}).front();
  detail::require_positive(phi, "phi", cfg);
  return phi;
}

/// phi(X) = sum_k exp(-|X - Y_k|/tau) over the snapped sources.
inline ExtendedField phi_fft(const PointSet& ps, const GridSpec& grid, const PrecisionConfig& cfg) {
  return dispatch_precision(cfg, [&]<class Real>() { return to_extended(phi_fft_raw<Real>(ps, grid, cfg)); });
}

/// S = -tau log phi.
inline ScalarField s_from_phi(const ExtendedField& phi, const PrecisionConfig& cfg) {
  cfg.validate();
  std::vector<double> s(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!(phi.mantissa(i) > 0.0))
      throw PrecisionError("phi is not positive at node " + std::to_string(i) + "; increase the precision");
    s[i] = -cfg.tau * phi.log(i);
  }
  return ScalarField(phi.grid(), std::move(s));
}

inline ScalarField s_from_phi(const ScalarField& phi, const PrecisionConfig& cfg) {
  cfg.validate();
  std::vector<double> s(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!(phi[i] > 0.0) || !std::isfinite(phi[i]))
      throw PrecisionError("phi is not positive at node " + std::to_string(i) + "; increase the precision");
    s[i] = -cfg.tau * std::log(phi[i]);
  }
  return ScalarField(phi.grid(), std::move(s));
}

/// FFT pipeline: s_from_phi(phi_fft(...)).
inline ScalarField s_fft(const PointSet& ps, const GridSpec& grid, const PrecisionConfig& cfg) {
  return s_from_phi(phi_fft(ps, grid, cfg), cfg);
}

inline double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    double t = a[d] - b[d];
    s += t * t;
  }
  return std::sqrt(s);
}

namespace detail {
inline void check_points(std::span<const Point> points, const GridSpec& grid) {
  if (points.empty()) throw ValidationError("point set is empty");
  for (std::size_t k = 0; k < points.size(); ++k)
    for (int d = 0; d < grid.dim(); ++d)
      if (!std::isfinite(points[k][d]))
        throw ValidationError("point " + std::to_string(k) + " has a non-finite coordinate");
}
}  // namespace detail

/// Exact distance R(X) = min_k |X - Y_k| at every node, using the given
/// (unsnapped) coordinates.
inline ScalarField r_exact(std::span<const Point> points, const GridSpec& grid) {
  detail::check_points(points, grid);
  std::vector<double> r(grid.size());
  const int dim = grid.dim();
  parallel_for(grid.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Point x = grid.position(i);
      double best2 = std::numeric_limits<double>::infinity();
      for (const Point& y : points) {
        double s = 0.0;
        for (int d = 0; d < dim; ++d) {
          double t = x[d] - y[d];
          s += t * t;
        }
        best2 = std::min(best2, s);
      }
      r[i] = std::sqrt(best2);
    }
  }, 64);
  return ScalarField(grid, std::move(r));
}

inline ScalarField r_exact(const PointSet& ps, const GridSpec& grid) { return r_exact(ps.points(), grid); }

/// "auto" picks bigfloat bits from the largest node-to-source distance of
/// the snapped sources; anything else goes through PrecisionConfig::parse.
inline PrecisionConfig resolve_precision(std::string_view spec, double tau, const PointSet& ps, const GridSpec& grid) {
  if (spec != "auto") return PrecisionConfig::parse(spec, tau);
  std::vector<Point> nodes;
  for (std::size_t n : ps.unique_nodes()) nodes.push_back(grid.position(n));
  ScalarField r = r_exact(nodes, grid);
  double reach = *std::max_element(r.values().begin(), r.values().end());
  PrecisionConfig cfg = PrecisionConfig::big(tau, PrecisionConfig::recommended_bits(reach, tau, nodes.size()));
  cfg.validate();
  return cfg;
}

/// S(X) = -tau log sum_k exp(-|X - Y_k|/tau) evaluated per node as
/// R - tau log sum_k exp(-(|X - Y_k| - R)/tau). Never underflows.
inline ScalarField s_direct(std::span<const Point> points, const GridSpec& grid, const PrecisionConfig& cfg) {
  cfg.validate();
  detail::check_points(points, grid);
  const double tau = cfg.tau;
  const int dim = grid.dim();
  std::vector<double> s(grid.size());
  parallel_for(grid.size(), [&](std::size_t lo, std::size_t hi) {
    std::vector<double> dist(points.size());
    for (std::size_t i = lo; i < hi; ++i) {
      Point x = grid.position(i);
      double r = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < points.size(); ++k) {
        dist[k] = distance(x, points[k], dim);
        r = std::min(r, dist[k]);
      }
      double sum = 0.0;
      for (double d : dist) sum += std::exp(-(d - r) / tau);
      s[i] = r - tau * std::log(sum);
    }
  }, 64);
  return ScalarField(grid, std::move(s));
}

inline ScalarField s_direct(const PointSet& ps, const GridSpec& grid, const PrecisionConfig& cfg) {
  return s_direct(ps.points(), grid, cfg);
}

/// Worst-case gap R - S = tau log K.
inline double error_bound(const PrecisionConfig& cfg, double k) {
  cfg.validate();
  if (!(k >= 1.0)) throw ValidationError("source count must be at least 1");
  return cfg.tau * std::log(k);
}

/// Pointwise max(S, 0).
inline ScalarField clamp_nonneg(const ScalarField& s) {
  std::vector<double> v = s.values();
  for (double& x : v) x = std::max(x, 0.0);
  return ScalarField(s.grid(), std::move(v));
}

}  // namespace convsdf

#endif  // CONVSDF_DISTANCE_HPP
