#ifndef CONVSDF_CONVOLUTION_HPP
#define CONVSDF_CONVOLUTION_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "convsdf/bigfloat.hpp"
#include "convsdf/errors.hpp"
#include "convsdf/fft.hpp"
#include "convsdf/grid.hpp"
#include "convsdf/parallel.hpp"

namespace convsdf {

/// Arithmetic backend plus the smoothing parameter tau (world units).
struct PrecisionConfig {
  enum class Mode { native64, bigfloat };

  Mode mode = Mode::native64;
  int bits = 53;
  double tau = 1e-2;

  static PrecisionConfig native(double tau) { return {Mode::native64, 53, tau}; }
  static PrecisionConfig big(double tau, int bits = 512) { return {Mode::bigfloat, bits, tau}; }

  /// "f64" or "big:<bits>".
  static PrecisionConfig parse(std::string_view spec, double tau) {
    if (spec == "f64") return native(tau);
    if (spec.substr(0, 4) == "big:") {
      std::string digits(spec.substr(4));
      std::size_t used = 0;
      int bits = 0;
      try {
        bits = std::stoi(digits, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != digits.size())
        throw ValidationError("precision must be f64 or big:<bits>, got '" + std::string(spec) + "'");
      PrecisionConfig cfg = big(tau, bits);
      cfg.validate();
      return cfg;
    }
    throw ValidationError("precision must be f64 or big:<bits>, got '" + std::string(spec) + "'");
  }

  bool is_big() const { return mode == Mode::bigfloat; }

  void validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive and finite");
    if (is_big() && bits < 64) throw ValidationError("bigfloat precision must be at least 64 bits");
  }

  std::string label() const { return is_big() ? "big:" + std::to_string(bits) : "f64"; }

  /// Smallest tau for which exp(-diagonal/tau) stays above double underflow.
  static double native_tau_floor(const GridSpec& grid) { return grid.diagonal() / 700.0; }

  /// Bits needed so that FFT roundoff, which is relative to the largest phi
  /// value, stays below phi at a node one grid diagonal away from every
  /// source, with about 64 bits left over.
  static int recommended_bits(const GridSpec& grid, double tau) {
    double bits = grid.diagonal() / (tau * std::numbers::ln2) + 64.0;
    return static_cast<int>(std::ceil(bits / 64.0)) * 64;
  }

  /// Same rule when every node lies within `reach` of a source and phi is
  /// at most the number of sources.
  static int recommended_bits(double reach, double tau, std::size_t sources) {
    double bits = reach / (tau * std::numbers::ln2) + std::log2(static_cast<double>(std::max<std::size_t>(sources, 1))) + 64.0;
    return std::max(64, static_cast<int>(std::ceil(bits / 64.0)) * 64);
  }
};

/// Constructs backend numbers from doubles at the configured precision.
template <class Real>
struct Num;

template <>
struct Num<double> {
  explicit Num(const PrecisionConfig&) {}
  double operator()(double x) const { return x; }
};

template <>
struct Num<BigFloat> {
  explicit Num(const PrecisionConfig& cfg) : bits(cfg.bits) {}
  BigFloat operator()(double x) const { return BigFloat(x, bits); }
  mpfr_prec_t bits;
};

inline double to_double(double x) { return x; }
inline double to_double(const BigFloat& x) { return x.to_double(); }
inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const BigFloat& x) { return x.is_finite(); }
inline int sign_of(double x) { return (x > 0) - (x < 0); }
inline int sign_of(const BigFloat& x) { return x.sign(); }

/// Integer lattice offset between two nodes, per axis.
using Offset = std::array<long, 3>;

/// A kernel sampled on the offset lattice [-extent, +extent] per axis at the
/// grid spacing. Storage is row-major over offsets, last axis fastest.
template <class Real>
class KernelField {
 public:
  KernelField(int dim, double spacing, std::array<std::size_t, 3> extent, std::vector<Real> values)
      : dim_(dim), spacing_(spacing), extent_(extent), values_(std::move(values)) {
    std::size_t expect = 1;
    for (int d = 0; d < dim_; ++d) expect *= 2 * extent_[d] + 1;
    for (int d = dim_; d < 3; ++d) extent_[d] = 0;
    if (values_.size() != expect) throw ValidationError("kernel sample count does not match extent");
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!is_finite(values_[i]))
        throw ValidationError("kernel sample " + std::to_string(i) + " is not finite");
  }

  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  std::size_t extent(int axis) const { return extent_[axis]; }
  std::size_t size() const { return values_.size(); }
  const std::vector<Real>& values() const { return values_; }

  std::size_t index(const Offset& o) const {
    std::size_t idx = 0;
    for (int d = 0; d < dim_; ++d)
      idx = idx * (2 * extent_[d] + 1) + static_cast<std::size_t>(o[d] + static_cast<long>(extent_[d]));
    return idx;
  }

  const Real& at(const Offset& o) const { return values_[index(o)]; }

 private:
  int dim_;
  double spacing_;
  std::array<std::size_t, 3> extent_;
  std::vector<Real> values_;
};

/// Samples fn(offset) on the smallest offset lattice covering every pair of
/// grid nodes (extent = count - 1 per axis).
template <class Real, class Fn>
KernelField<Real> sample_kernel(const GridSpec& grid, Fn&& fn) {
  std::array<std::size_t, 3> extent{0, 0, 0};
  std::array<std::size_t, 3> span{1, 1, 1};
  std::size_t total = 1;
  for (int d = 0; d < grid.dim(); ++d) {
    extent[d] = grid.count(d) - 1;
    span[d] = 2 * extent[d] + 1;
    total *= span[d];
  }
  std::vector<Real> values;
  values.reserve(total);
  Offset o{0, 0, 0};
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    for (int d = grid.dim() - 1; d >= 0; --d) {
      o[d] = static_cast<long>(rem % span[d]) - static_cast<long>(extent[d]);
      rem /= span[d];
    }
    values.push_back(fn(o));
  }
  return KernelField<Real>(grid.dim(), grid.spacing(), extent, std::move(values));
}

/// Lazily filled table of r = h*sqrt(r2) and exp(-r/tau) keyed by the
/// integer squared offset length r2. Radially symmetric kernels only need
/// one transcendental evaluation per distinct r2.
template <class Real>
class RadialTable {
 public:
  RadialTable(const GridSpec& grid, const PrecisionConfig& cfg) : num_(cfg), h_(grid.spacing()), tau_(cfg.tau) {
    std::size_t max_r2 = 0;
    for (int d = 0; d < grid.dim(); ++d) max_r2 += (grid.count(d) - 1) * (grid.count(d) - 1);
    r_.resize(max_r2 + 1);
    e_.resize(max_r2 + 1);
    ready_.assign(max_r2 + 1, 0);
  }

  static std::size_t r2_of(const Offset& o) {
    return static_cast<std::size_t>(o[0] * o[0] + o[1] * o[1] + o[2] * o[2]);
  }

  const Real& r(std::size_t r2) { return fill(r2), r_[r2]; }
  const Real& e(std::size_t r2) { return fill(r2), e_[r2]; }

 private:
  void fill(std::size_t r2) {
    if (ready_[r2]) return;
    using std::exp;
    using std::sqrt;
    Real r = sqrt(num_(static_cast<double>(r2))) * h_;
    Real e = exp(-(r / tau_));
    r_[r2] = std::move(r);
    e_[r2] = std::move(e);
    ready_[r2] = 1;
  }

  Num<Real> num_;
  double h_;
  double tau_;
  std::vector<Real> r_;
  std::vector<Real> e_;
  std::vector<char> ready_;
};

namespace detail {

enum class Part { real, imag };

// ---- element access -------------------------------------------------------

inline void set_part(Spectrum<double>& s, std::size_t i, Part p, double v) {
  if (p == Part::real) {
    s[i].real(v);
  } else {
    s[i].imag(v);
  }
}
inline double get_part(const Spectrum<double>& s, std::size_t i, Part p) {
  return p == Part::real ? s[i].real() : s[i].imag();
}

inline void set_part(Spectrum<BigFloat>& s, std::size_t i, Part p, const BigFloat& v) {
  mpfr_set(p == Part::real ? s.re(i) : s.im(i), v.get(), MPFR_RNDN);
}
inline void set_part(Spectrum<BigFloat>& s, std::size_t i, Part p, double v) {
  mpfr_set_d(p == Part::real ? s.re(i) : s.im(i), v, MPFR_RNDN);
}
inline BigFloat get_part(const Spectrum<BigFloat>& s, std::size_t i, Part p) {
  return BigFloat::from_mpfr(p == Part::real ? s.re(i) : s.im(i), s.precision());
}

// ---- Hermitian pair kernels ------------------------------------------------
//
// For real a, b and C = FFT(a + i b), with d = C[-k]:
//   A[k] = (C[k] + conj d) / 2,   B[k] = (C[k] - conj d) / (2i),
// and A[-k] = conj A[k], B[-k] = conj B[k].

/// Mirror index of k on the padded lattice: (-k) mod M per axis.
class Mirror {
 public:
  explicit Mirror(const Shape& shape) : shape_(shape) {}
  std::size_t operator()(std::size_t k) const {
    std::size_t out = 0, mult = 1;
    for (std::size_t d = shape_.size(); d-- > 0;) {
      std::size_t n = shape_[d];
      std::size_t c = k % n;
      k /= n;
      out += ((n - c) % n) * mult;
      mult *= n;
    }
    return out;
  }

 private:
  Shape shape_;
};

template <class Body>
void for_each_pair(const Shape& shape, std::size_t size, Body&& body) {
  Mirror mirror(shape);
  parallel_for(size, [&](std::size_t lo, std::size_t hi) {
    auto state = body.make_state();
    for (std::size_t k = lo; k < hi; ++k) {
      std::size_t mk = mirror(k);
      if (mk < k) continue;
      body(state, k, mk);
    }
  });
}

// C = FFT(g + i k)  ->  G := FFT(g), C := FFT(k) * FFT(g)
struct SeparateNative {
  Spectrum<double>& c;
  Spectrum<double>& g;
  int make_state() const { return 0; }
  void operator()(int, std::size_t k, std::size_t mk) const {
    std::complex<double> ck = c[k], dk = std::conj(c[mk]);
    std::complex<double> a = 0.5 * (ck + dk);
    std::complex<double> b = (ck - dk) / std::complex<double>(0.0, 2.0);
    std::complex<double> p = a * b;
    g[k] = a;
    c[k] = p;
    if (mk != k) {
      g[mk] = std::conj(a);
      c[mk] = std::conj(p);
    }
  }
};

// C = FFT(ka + i kb)  ->  C := FFT(ka)G + i FFT(kb)G
struct PairProductsNative {
  Spectrum<double>& c;
  const Spectrum<double>& g;
  int make_state() const { return 0; }
  void operator()(int, std::size_t k, std::size_t mk) const {
    std::complex<double> ck = c[k], dk = std::conj(c[mk]);
    std::complex<double> a = 0.5 * (ck + dk);
    std::complex<double> b = (ck - dk) / std::complex<double>(0.0, 2.0);
    std::complex<double> pa = a * g[k], pb = b * g[k];
    const std::complex<double> i(0.0, 1.0);
    c[k] = pa + i * pb;
    if (mk != k) c[mk] = std::conj(pa) + i * std::conj(pb);
  }
};

// C = FFT(k + i g)  ->  acc += FFT(k) FFT(g)
struct AccumulateNative {
  const Spectrum<double>& c;
  Spectrum<double>& acc;
  int make_state() const { return 0; }
  void operator()(int, std::size_t k, std::size_t mk) const {
    std::complex<double> ck = c[k], dk = std::conj(c[mk]);
    std::complex<double> a = 0.5 * (ck + dk);
    std::complex<double> b = (ck - dk) / std::complex<double>(0.0, 2.0);
    std::complex<double> p = a * b;
    acc[k] += p;
    if (mk != k) acc[mk] += std::conj(p);
  }
};

struct BigTemps {
  explicit BigTemps(mpfr_prec_t bits)
      : ar(bits), ai(bits), br(bits), bi(bits), pr(bits), pi(bits), qr(bits), qi(bits) {}
  BigFloat ar, ai, br, bi, pr, pi, qr, qi;
};

// Loads A = ((cr+dr)/2, (ci-di)/2) and B = ((ci+di)/2, (dr-cr)/2) with
// c = C[k] and d = C[-k].
inline void split_big(const Spectrum<BigFloat>& c, std::size_t k, std::size_t mk, BigTemps& t) {
  mpfr_srcptr cr = c.re(k), ci = c.im(k), dr = c.re(mk), di = c.im(mk);
  mpfr_add(t.ar.get(), cr, dr, MPFR_RNDN);
  mpfr_sub(t.ai.get(), ci, di, MPFR_RNDN);
  mpfr_add(t.br.get(), ci, di, MPFR_RNDN);
  mpfr_sub(t.bi.get(), dr, cr, MPFR_RNDN);
  for (BigFloat* x : {&t.ar, &t.ai, &t.br, &t.bi}) mpfr_div_2ui(x->get(), x->get(), 1, MPFR_RNDN);
}

// (xr + i xi)(yr + i yi) -> (outr, outi); outputs must not alias inputs.
inline void cmul(mpfr_ptr outr, mpfr_ptr outi, mpfr_srcptr xr, mpfr_srcptr xi, mpfr_srcptr yr,
                 mpfr_srcptr yi) {
  mpfr_fmms(outr, xr, yr, xi, yi, MPFR_RNDN);
  mpfr_fmma(outi, xr, yi, xi, yr, MPFR_RNDN);
}

struct SeparateBig {
  Spectrum<BigFloat>& c;
  Spectrum<BigFloat>& g;
  BigTemps make_state() const { return BigTemps(c.precision()); }
  void operator()(BigTemps& t, std::size_t k, std::size_t mk) const {
    split_big(c, k, mk, t);
    cmul(t.pr.get(), t.pi.get(), t.ar.get(), t.ai.get(), t.br.get(), t.bi.get());
    mpfr_set(g.re(k), t.ar.get(), MPFR_RNDN);
    mpfr_set(g.im(k), t.ai.get(), MPFR_RNDN);
    mpfr_set(c.re(k), t.pr.get(), MPFR_RNDN);
    mpfr_set(c.im(k), t.pi.get(), MPFR_RNDN);
    if (mk != k) {
      mpfr_set(g.re(mk), t.ar.get(), MPFR_RNDN);
      mpfr_neg(g.im(mk), t.ai.get(), MPFR_RNDN);
      mpfr_set(c.re(mk), t.pr.get(), MPFR_RNDN);
      mpfr_neg(c.im(mk), t.pi.get(), MPFR_RNDN);
    }
  }
};

struct PairProductsBig {
  Spectrum<BigFloat>& c;
  const Spectrum<BigFloat>& g;
  BigTemps make_state() const { return BigTemps(c.precision()); }
  void operator()(BigTemps& t, std::size_t k, std::size_t mk) const {
    split_big(c, k, mk, t);
    cmul(t.pr.get(), t.pi.get(), t.ar.get(), t.ai.get(), g.re(k), g.im(k));  // Pa
    cmul(t.qr.get(), t.qi.get(), t.br.get(), t.bi.get(), g.re(k), g.im(k));  // Pb
    // C[k] = Pa + i Pb, C[-k] = conj(Pa) + i conj(Pb)
    mpfr_sub(c.re(k), t.pr.get(), t.qi.get(), MPFR_RNDN);
    mpfr_add(c.im(k), t.pi.get(), t.qr.get(), MPFR_RNDN);
    if (mk != k) {
      mpfr_add(c.re(mk), t.pr.get(), t.qi.get(), MPFR_RNDN);
      mpfr_sub(c.im(mk), t.qr.get(), t.pi.get(), MPFR_RNDN);
    }
  }
};

struct AccumulateBig {
  const Spectrum<BigFloat>& c;
  Spectrum<BigFloat>& acc;
  BigTemps make_state() const { return BigTemps(c.precision()); }
  void operator()(BigTemps& t, std::size_t k, std::size_t mk) const {
    split_big(c, k, mk, t);
    cmul(t.pr.get(), t.pi.get(), t.ar.get(), t.ai.get(), t.br.get(), t.bi.get());
    mpfr_add(acc.re(k), acc.re(k), t.pr.get(), MPFR_RNDN);
    mpfr_add(acc.im(k), acc.im(k), t.pi.get(), MPFR_RNDN);
    if (mk != k) {
      mpfr_add(acc.re(mk), acc.re(mk), t.pr.get(), MPFR_RNDN);
      mpfr_sub(acc.im(mk), acc.im(mk), t.pi.get(), MPFR_RNDN);
    }
  }
};

inline void separate(Spectrum<double>& c, Spectrum<double>& g) {
  for_each_pair(c.shape(), c.size(), SeparateNative{c, g});
}
inline void separate(Spectrum<BigFloat>& c, Spectrum<BigFloat>& g) {
  for_each_pair(c.shape(), c.size(), SeparateBig{c, g});
}
inline void pair_products(Spectrum<double>& c, const Spectrum<double>& g) {
  for_each_pair(c.shape(), c.size(), PairProductsNative{c, g});
}
inline void pair_products(Spectrum<BigFloat>& c, const Spectrum<BigFloat>& g) {
  for_each_pair(c.shape(), c.size(), PairProductsBig{c, g});
}
inline void accumulate_products(const Spectrum<double>& c, Spectrum<double>& acc) {
  for_each_pair(c.shape(), c.size(), AccumulateNative{c, acc});
}
inline void accumulate_products(const Spectrum<BigFloat>& c, Spectrum<BigFloat>& acc) {
  for_each_pair(c.shape(), c.size(), AccumulateBig{c, acc});
}

}  // namespace detail

/// Zero-padded FFT convolution of kernels with impulse fields on one grid.
///
/// Outputs are the linear (non-circular) convolution restricted to grid
/// nodes: out(X) = sum_nodes kernel(X - node) * impulses(node). Each axis is
/// padded to at least 2*count - 1 points, which gives every offset in
/// [-(count-1), count-1] its own residue, so no wrapped term reaches a node.
///
/// Real inputs are packed pairwise into complex transforms, and pairs of
/// real outputs share one inverse transform.
template <class Real>
class Convolver {
 public:
  using KernelSource = std::function<KernelField<Real>()>;

  Convolver(GridSpec grid, PrecisionConfig cfg) : grid_(std::move(grid)), cfg_(cfg) {
    cfg_.validate();
    if (std::is_same_v<Real, BigFloat> != cfg_.is_big())
      throw ValidationError("convolver backend does not match the precision mode");
    for (int d = 0; d < grid_.dim(); ++d)
      padded_.push_back(preferred_fft_size<Real>(2 * grid_.count(d) - 1));
  }

  const GridSpec& grid() const { return grid_; }
  const Shape& padded_shape() const { return padded_; }

  /// kernel * impulses for a single kernel.
  Field<Real> convolve(const KernelField<Real>& kernel, const ScalarField& impulses) const {
    auto out = convolve_many(impulses, {[&kernel] { return kernel; }});
    return std::move(out.front());
  }

  /// kernel_i * impulses for every kernel; the impulse transform is shared.
  /// Kernels are materialized on demand, at most two at a time.
  std::vector<Field<Real>> convolve_many(const ScalarField& impulses,
                                         const std::vector<KernelSource>& kernels) const {
    check_impulses(impulses);
    std::vector<std::vector<Real>> outputs(kernels.size());
    if (kernels.empty()) return {};
    Spectrum<Real> g = make_spectrum();
    Spectrum<Real> work = make_spectrum();

    // The last kernel rides along with the impulse transform when the
    // kernel count is odd.
    std::size_t paired = kernels.size();
    if (kernels.size() % 2 == 1) {
      paired -= 1;
      load_impulses(work, impulses, detail::Part::real);
      {
        KernelField<Real> k = kernels.back()();
        load_kernel(work, k, detail::Part::imag);
      }
      fft_forward(work);
      detail::separate(work, g);
      fft_inverse(work);
      outputs.back() = extract(work, detail::Part::real);
    } else {
      load_impulses(g, impulses, detail::Part::real);
      fft_forward(g);
    }

    for (std::size_t i = 0; i < paired; i += 2) {
      clear(work);
      {
        KernelField<Real> ka = kernels[i]();
        load_kernel(work, ka, detail::Part::real);
      }
      {
        KernelField<Real> kb = kernels[i + 1]();
        load_kernel(work, kb, detail::Part::imag);
      }
      fft_forward(work);
      detail::pair_products(work, g);
      fft_inverse(work);
      outputs[i] = extract(work, detail::Part::real);
      outputs[i + 1] = extract(work, detail::Part::imag);
    }

    std::vector<Field<Real>> fields;
    fields.reserve(outputs.size());
    for (auto& o : outputs) fields.emplace_back(grid_, std::move(o));
    return fields;
  }

  /// sum_i kernel_i * impulses_i with a single inverse transform.
  Field<Real> convolve_sum(const std::vector<std::pair<KernelSource, const ScalarField*>>& terms) const {
    if (terms.empty()) throw ValidationError("convolve_sum needs at least one term");
    Spectrum<Real> acc = make_spectrum();
    Spectrum<Real> work = make_spectrum();
    for (const auto& [source, impulses] : terms) {
      check_impulses(*impulses);
      clear(work);
      {
        KernelField<Real> k = source();
        load_kernel(work, k, detail::Part::real);
      }
      load_impulses(work, *impulses, detail::Part::imag);
      fft_forward(work);
      detail::accumulate_products(work, acc);
    }
    fft_inverse(acc);
    return Field<Real>(grid_, extract(acc, detail::Part::real));
  }

 private:
  Spectrum<Real> make_spectrum() const {
    if constexpr (std::is_same_v<Real, BigFloat>) {
      return Spectrum<Real>(padded_, cfg_.bits);
    } else {
      return Spectrum<Real>(padded_);
    }
  }

  static void clear(Spectrum<double>& s) {
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.0;
  }
  static void clear(Spectrum<BigFloat>& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      mpfr_set_zero(s.re(i), 1);
      mpfr_set_zero(s.im(i), 1);
    }
  }

  void check_impulses(const ScalarField& impulses) const {
    if (!(impulses.grid() == grid_)) throw ValidationError("impulse field is on a different grid");
    for (std::size_t i = 0; i < impulses.size(); ++i)
      if (!std::isfinite(impulses[i])) throw ValidationError("impulse field has a non-finite value");
  }

  void check_kernel(const KernelField<Real>& k) const {
    if (k.dim() != grid_.dim()) throw ValidationError("kernel dimension does not match grid");
    if (std::abs(k.spacing() - grid_.spacing()) > 1e-12 * grid_.spacing())
      throw ValidationError("kernel spacing does not match grid spacing");
    for (int d = 0; d < grid_.dim(); ++d)
      if (k.extent(d) + 1 < grid_.count(d))
        throw ValidationError("kernel extent is smaller than the grid extent");
  }

  std::size_t padded_index(const NodeIndex& node) const {
    std::size_t idx = 0;
    for (int d = 0; d < grid_.dim(); ++d) idx = idx * padded_[d] + node[d];
    return idx;
  }

  void load_impulses(Spectrum<Real>& s, const ScalarField& impulses, detail::Part part) const {
    for (std::size_t i = 0; i < impulses.size(); ++i) {
      double v = impulses[i];
      if (v != 0.0) detail::set_part(s, padded_index(grid_.node(i)), part, v);
    }
  }

  void load_kernel(Spectrum<Real>& s, const KernelField<Real>& k, detail::Part part) const {
    check_kernel(k);
    const int dim = grid_.dim();
    std::array<long, 3> reach{0, 0, 0};
    std::array<std::size_t, 3> span{1, 1, 1};
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) {
      reach[d] = static_cast<long>(grid_.count(d)) - 1;
      span[d] = 2 * static_cast<std::size_t>(reach[d]) + 1;
      total *= span[d];
    }
    Offset o{0, 0, 0};
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t rem = i;
      std::size_t idx = 0, mult = 1;
      for (int d = dim - 1; d >= 0; --d) {
        o[d] = static_cast<long>(rem % span[d]) - reach[d];
        rem /= span[d];
      }
      for (int d = dim - 1; d >= 0; --d) {
        long m = static_cast<long>(padded_[d]);
        idx += static_cast<std::size_t>(((o[d] % m) + m) % m) * mult;
        mult *= padded_[d];
      }
      detail::set_part(s, idx, part, k.at(o));
    }
  }

  std::vector<Real> extract(const Spectrum<Real>& s, detail::Part part) const {
    std::vector<Real> out;
    out.reserve(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i)
      out.push_back(detail::get_part(s, padded_index(grid_.node(i)), part));
    return out;
  }

  GridSpec grid_;
  PrecisionConfig cfg_;
  Shape padded_;
};

/// Single-kernel convolution in native double precision.
inline ScalarField fft_convolve(const KernelField<double>& kernel, const ScalarField& impulses,
                                const PrecisionConfig& cfg) {
  if (cfg.is_big()) throw ValidationError("double kernel passed with a bigfloat precision config");
  return Convolver<double>(impulses.grid(), cfg).convolve(kernel, impulses);
}

/// Single-kernel convolution at bigfloat precision; values stay in MPFR.
inline Field<BigFloat> fft_convolve(const KernelField<BigFloat>& kernel, const ScalarField& impulses,
                                    const PrecisionConfig& cfg) {
  if (!cfg.is_big()) throw ValidationError("bigfloat kernel passed with a native precision config");
  return Convolver<BigFloat>(impulses.grid(), cfg).convolve(kernel, impulses);
}

/// Calls fn.template operator()<Real>() with Real chosen by the precision mode.
template <class Fn>
decltype(auto) dispatch_precision(const PrecisionConfig& cfg, Fn&& fn) {
  cfg.validate();
  if (cfg.is_big()) return fn.template operator()<BigFloat>();
  return fn.template operator()<double>();
}

}  // namespace convsdf

#endif  // CONVSDF_CONVOLUTION_HPP
