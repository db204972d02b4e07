#ifndef CONVSDF_BIGFLOAT_HPP
#define CONVSDF_BIGFLOAT_HPP

// Thin value-semantics wrapper over MPFR, plus a contiguous array type for
// the FFT hot loops.

#include <mpfr.h>

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace convsdf {

/// Multiple-precision real. Binary operations round to the larger of the two
/// operand precisions; mixing with double uses the BigFloat's precision.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t bits = 64) {
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
  }
  BigFloat(double x, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  static BigFloat from_long(long x, mpfr_prec_t bits) {
    BigFloat r(bits);
    mpfr_set_si(r.v_, x, MPFR_RNDN);
    return r;
  }
  static BigFloat from_mpfr(mpfr_srcptr x, mpfr_prec_t bits) {
    BigFloat r(bits);
    mpfr_set(r.v_, x, MPFR_RNDN);
    return r;
  }
  static BigFloat pi(mpfr_prec_t bits) {
    BigFloat r(bits);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }

  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  /// Returns m with 0.5 <= |m| < 1 and sets exponent so that
  /// value = m * 2^exponent (m = 0, exponent = 0 for zero).
  double frexp(long& exponent) const {
    if (mpfr_zero_p(v_)) {
      exponent = 0;
      return 0.0;
    }
    return mpfr_get_d_2exp(&exponent, v_, MPFR_RNDN);
  }

  BigFloat& operator+=(const BigFloat& o) { return apply(o, mpfr_add); }
  BigFloat& operator-=(const BigFloat& o) { return apply(o, mpfr_sub); }
  BigFloat& operator*=(const BigFloat& o) { return apply(o, mpfr_mul); }
  BigFloat& operator/=(const BigFloat& o) { return apply(o, mpfr_div); }
  BigFloat& operator+=(double o) { mpfr_add_d(v_, v_, o, MPFR_RNDN); return *this; }
  BigFloat& operator-=(double o) { mpfr_sub_d(v_, v_, o, MPFR_RNDN); return *this; }
  BigFloat& operator*=(double o) { mpfr_mul_d(v_, v_, o, MPFR_RNDN); return *this; }
  BigFloat& operator/=(double o) { mpfr_div_d(v_, v_, o, MPFR_RNDN); return *this; }

  friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
  friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
  friend BigFloat operator+(BigFloat a, double b) { return a += b; }
  friend BigFloat operator-(BigFloat a, double b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, double b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, double b) { return a /= b; }
  friend BigFloat operator*(double a, BigFloat b) { return b *= a; }
  friend BigFloat operator-(BigFloat a) {
    mpfr_neg(a.v_, a.v_, MPFR_RNDN);
    return a;
  }

  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_); }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_); }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.v_, b.v_); }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_greaterequal_p(a.v_, b.v_); }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_); }

  friend BigFloat exp(BigFloat a) { return a.unary(mpfr_exp); }
  friend BigFloat log(BigFloat a) { return a.unary(mpfr_log); }
  friend BigFloat sqrt(BigFloat a) { return a.unary(mpfr_sqrt); }
  friend BigFloat abs(BigFloat a) { return a.unary(mpfr_abs); }

 private:
  template <class Op>
  BigFloat& apply(const BigFloat& o, Op op) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    op(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }
  template <class Op>
  BigFloat unary(Op op) {
    op(v_, v_, MPFR_RNDN);
    return std::move(*this);
  }

  mpfr_t v_;
};

/// Fixed-precision array of MPFR numbers with all mantissas in one
/// allocation (MPFR custom interface). Elements are addressed as mpfr_ptr and
/// must never be resized or cleared individually. Move-only.
class BigArray {
 public:
  BigArray() = default;
  BigArray(std::size_t n, mpfr_prec_t bits) : bits_(bits), vars_(n) {
    limbs_per_ = (mpfr_custom_get_size(bits) + sizeof(mp_limb_t) - 1) / sizeof(mp_limb_t);
    limbs_.resize(n * limbs_per_);
    for (std::size_t i = 0; i < n; ++i) {
      mp_limb_t* m = limbs_.data() + i * limbs_per_;
      mpfr_custom_init(m, bits);
      mpfr_custom_init_set(&vars_[i], MPFR_ZERO_KIND, 0, bits, m);
    }
  }
  BigArray(const BigArray&) = delete;
  BigArray& operator=(const BigArray&) = delete;
  BigArray(BigArray&&) noexcept = default;
  BigArray& operator=(BigArray&&) noexcept = default;

  std::size_t size() const { return vars_.size(); }
  mpfr_prec_t precision() const { return bits_; }
  mpfr_ptr operator[](std::size_t i) { return &vars_[i]; }
  mpfr_srcptr operator[](std::size_t i) const { return &vars_[i]; }

  void set_zero() {
    for (auto& v : vars_) mpfr_set_zero(&v, 1);
  }

 private:
  mpfr_prec_t bits_ = 64;
  std::size_t limbs_per_ = 0;
  std::vector<mp_limb_t> limbs_;
  std::vector<__mpfr_struct> vars_;
};

}  // namespace convsdf

#endif  // CONVSDF_BIGFLOAT_HPP
