#ifndef CONVSDF_FFT_HPP
#define CONVSDF_FFT_HPP

// Multi-dimensional complex FFTs for the two arithmetic backends.
//
//   Spectrum<double>    FFTW buffer, any size per axis.
//   Spectrum<BigFloat>  MPFR numbers at a fixed precision, power-of-two axes,
//                       iterative radix-2 with twiddles at working precision.
//
// Plans are immutable once built and cached by (shape, precision). The
// inverse transform includes the 1/M normalization.

#include <fftw3.h>
#include <mpfr.h>

#include <climits>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "convsdf/bigfloat.hpp"
#include "convsdf/errors.hpp"
#include "convsdf/parallel.hpp"

namespace convsdf {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  if (shape.empty()) throw ValidationError("FFT shape has no axes");
  std::size_t total = 1;
  for (std::size_t n : shape) {
    if (n == 0) throw ValidationError("FFT axis has zero length");
    if (n > static_cast<std::size_t>(INT_MAX) || total > (SIZE_MAX / 64) / n)
      throw ValidationError("FFT size overflows");
    total *= n;
  }
  return total;
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Smallest integer >= n whose only prime factors are 2, 3, 5 and 7.
inline std::size_t next_smooth_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

enum class Direction { forward, inverse };

template <class Real>
class Spectrum;

/// Complex array in FFTW-aligned storage.
template <>
class Spectrum<double> {
 public:
  using value_type = std::complex<double>;

  explicit Spectrum(Shape shape, mpfr_prec_t /*bits*/ = 53)
      : shape_(std::move(shape)), size_(shape_size(shape_)), data_(fftw_alloc_complex(size_)) {
    if (!data_) throw std::bad_alloc();
    for (std::size_t i = 0; i < size_; ++i) data()[i] = 0.0;
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return size_; }
  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(data_.get()); }
  const std::complex<double>* data() const {
    return reinterpret_cast<const std::complex<double>*>(data_.get());
  }
  std::complex<double>& operator[](std::size_t i) { return data()[i]; }
  const std::complex<double>& operator[](std::size_t i) const { return data()[i]; }
  fftw_complex* raw() { return data_.get(); }

 private:
  struct Free {
    void operator()(fftw_complex* p) const { fftw_free(p); }
  };
  Shape shape_;
  std::size_t size_;
  std::unique_ptr<fftw_complex, Free> data_;
};

/// Complex array of MPFR numbers, real and imaginary parts stored separately.
template <>
class Spectrum<BigFloat> {
 public:
  Spectrum(Shape shape, mpfr_prec_t bits)
      : shape_(std::move(shape)), size_(shape_size(shape_)), re_(size_, bits), im_(size_, bits) {}

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return size_; }
  mpfr_prec_t precision() const { return re_.precision(); }
  mpfr_ptr re(std::size_t i) { return re_[i]; }
  mpfr_ptr im(std::size_t i) { return im_[i]; }
  mpfr_srcptr re(std::size_t i) const { return re_[i]; }
  mpfr_srcptr im(std::size_t i) const { return im_[i]; }
  void swap_elements(std::size_t a, std::size_t b) {
    mpfr_swap(re_[a], re_[b]);
    mpfr_swap(im_[a], im_[b]);
  }

 private:
  Shape shape_;
  std::size_t size_;
  BigArray re_, im_;
};

namespace detail {

class NativePlan {
 public:
  explicit NativePlan(const Shape& shape) : size_(shape_size(shape)) {
    std::vector<int> dims(shape.begin(), shape.end());
    fftw_complex* scratch = fftw_alloc_complex(size_);
    if (!scratch) throw std::bad_alloc();
    forward_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), scratch, scratch,
                             FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), scratch, scratch,
                             FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(scratch);
    if (!forward_ || !inverse_) throw std::runtime_error("FFTW failed to create a plan");
  }
  NativePlan(const NativePlan&) = delete;
  NativePlan& operator=(const NativePlan&) = delete;
  ~NativePlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  void execute(Spectrum<double>& a, Direction dir) const {
    fftw_execute_dft(dir == Direction::forward ? forward_ : inverse_, a.raw(), a.raw());
    if (dir == Direction::inverse) {
      double scale = 1.0 / static_cast<double>(size_);
      for (std::size_t i = 0; i < size_; ++i) a[i] *= scale;
    }
  }

 private:
  std::size_t size_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

/// Twiddle factors cos/sin(2*pi*j/n), j < n/2, and the bit-reversal table
/// for one power-of-two length.
class BigAxisPlan {
 public:
  BigAxisPlan(std::size_t n, mpfr_prec_t bits) : n_(n), cos_(n / 2, bits), sin_(n / 2, bits), rev_(n) {
    unsigned log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (unsigned b = 0; b < log2n; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
      rev_[i] = r;
    }
    mpfr_t angle;
    mpfr_init2(angle, bits + 32);
    for (std::size_t j = 0; j < n / 2; ++j) {
      mpfr_const_pi(angle, MPFR_RNDN);
      mpfr_mul_ui(angle, angle, 2 * j, MPFR_RNDN);
      mpfr_div_ui(angle, angle, n, MPFR_RNDN);
      mpfr_sin_cos(sin_[j], cos_[j], angle, MPFR_RNDN);
    }
    mpfr_clear(angle);
  }

  std::size_t length() const { return n_; }

  /// In-place transform of the n elements at base, base + stride, ...
  void run(Spectrum<BigFloat>& a, std::size_t base, std::size_t stride, Direction dir, mpfr_ptr tr,
           mpfr_ptr ti) const {
    auto at = [&](std::size_t i) { return base + i * stride; };
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t j = rev_[i];
      if (i < j) a.swap_elements(at(i), at(j));
    }
    const bool fwd = dir == Direction::forward;
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      std::size_t half = len / 2;
      std::size_t tstep = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          std::size_t ia = at(start + j), ib = at(start + j + half);
          mpfr_ptr br = a.re(ib), bi = a.im(ib);
          if (j == 0) {
            mpfr_set(tr, br, MPFR_RNDN);
            mpfr_set(ti, bi, MPFR_RNDN);
          } else {
            mpfr_srcptr c = cos_[j * tstep];
            mpfr_srcptr s = sin_[j * tstep];
            if (fwd) {  // (c - i s) * b
              mpfr_fmma(tr, c, br, s, bi, MPFR_RNDN);
              mpfr_fmms(ti, c, bi, s, br, MPFR_RNDN);
            } else {  // (c + i s) * b
              mpfr_fmms(tr, c, br, s, bi, MPFR_RNDN);
              mpfr_fmma(ti, c, bi, s, br, MPFR_RNDN);
            }
          }
          mpfr_ptr ar = a.re(ia), ai = a.im(ia);
          mpfr_sub(br, ar, tr, MPFR_RNDN);
          mpfr_sub(bi, ai, ti, MPFR_RNDN);
          mpfr_add(ar, ar, tr, MPFR_RNDN);
          mpfr_add(ai, ai, ti, MPFR_RNDN);
        }
      }
    }
  }

 private:
  std::size_t n_;
  BigArray cos_, sin_;
  std::vector<std::size_t> rev_;
};

class BigPlan {
 public:
  BigPlan(const Shape& shape, mpfr_prec_t bits) : shape_(shape), bits_(bits) {
    shape_size(shape);
    for (std::size_t n : shape) {
      if (!is_power_of_two(n))
        throw ValidationError("bigfloat FFT needs power-of-two axis lengths, got " + std::to_string(n));
      axes_.push_back(std::make_unique<BigAxisPlan>(n, bits));
    }
  }

  void execute(Spectrum<BigFloat>& a, Direction dir) const {
    if (a.shape() != shape_) throw ValidationError("spectrum shape does not match plan");
    const std::size_t total = a.size();
    std::size_t stride = total;
    for (std::size_t d = 0; d < shape_.size(); ++d) {
      const std::size_t n = shape_[d];
      stride /= n;
      const std::size_t block = n * stride;
      const std::size_t lines = total / n;
      const BigAxisPlan& axis = *axes_[d];
      parallel_for(
          lines,
          [&](std::size_t lo, std::size_t hi) {
            BigFloat tr(bits_), ti(bits_);
            for (std::size_t line = lo; line < hi; ++line) {
              std::size_t base = (line / stride) * block + line % stride;
              axis.run(a, base, stride, dir, tr.get(), ti.get());
            }
          },
          1);
    }
    if (dir == Direction::inverse) {
      unsigned long shift = 0;
      while ((std::size_t{1} << shift) < total) ++shift;
      parallel_for(total, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          mpfr_div_2ui(a.re(i), a.re(i), shift, MPFR_RNDN);
          mpfr_div_2ui(a.im(i), a.im(i), shift, MPFR_RNDN);
        }
      });
    }
  }

 private:
  Shape shape_;
  mpfr_prec_t bits_;
  std::vector<std::unique_ptr<BigAxisPlan>> axes_;
};

template <class Plan>
class PlanCache {
 public:
  std::shared_ptr<const Plan> get(const Shape& shape, mpfr_prec_t bits) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(shape, bits);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::shared_ptr<const Plan> plan;
    if constexpr (std::is_same_v<Plan, NativePlan>) {
      plan = std::make_shared<const Plan>(shape);
    } else {
      plan = std::make_shared<const Plan>(shape, bits);
    }
    plans_.emplace(key, plan);
    return plan;
  }

  std::size_t size() {
    std::lock_guard<std::mutex> lock(mutex_);
    return plans_.size();
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<Shape, mpfr_prec_t>, std::shared_ptr<const Plan>> plans_;
};

inline PlanCache<NativePlan>& native_plans() {
  static PlanCache<NativePlan> cache;
  return cache;
}

inline PlanCache<BigPlan>& big_plans() {
  static PlanCache<BigPlan> cache;
  return cache;
}

}  // namespace detail

inline void fft_execute(Spectrum<double>& a, Direction dir) {
  detail::native_plans().get(a.shape(), 53)->execute(a, dir);
}

inline void fft_execute(Spectrum<BigFloat>& a, Direction dir) {
  detail::big_plans().get(a.shape(), a.precision())->execute(a, dir);
}

template <class Real>
void fft_forward(Spectrum<Real>& a) {
  fft_execute(a, Direction::forward);
}

/// Inverse transform, normalized so that inverse(forward(x)) == x.
template <class Real>
void fft_inverse(Spectrum<Real>& a) {
  fft_execute(a, Direction::inverse);
}

/// Padded axis length the backend prefers for at least n points.
template <class Real>
std::size_t preferred_fft_size(std::size_t n) {
  if constexpr (std::is_same_v<Real, double>) {
    return next_smooth_size(n);
  } else {
    return next_power_of_two(n);
  }
}

}  // namespace convsdf

#endif  // CONVSDF_FFT_HPP
