#pragma once

// Arbitrary-precision binary floating point backed by MPFR.
//
// Every value carries its own mantissa width. New values (including the
// results of arithmetic) are created at the thread's *working precision*,
// which defaults to 256 bits and is changed with PrecisionScope.

#include <mpfr.h>

#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>

namespace bglue::numeric {

inline constexpr int kDefaultPrecisionBits = 256;

/// Current working precision of the calling thread, in mantissa bits.
int working_precision() noexcept;

/// RAII override of the calling thread's working precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(int bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  int saved_;
};

class BigScalar {
 public:
  BigScalar();
  BigScalar(double v);  // NOLINT(google-explicit-constructor)
  BigScalar(int v);     // NOLINT(google-explicit-constructor)
  BigScalar(long v);    // NOLINT(google-explicit-constructor)
  /// Parses a decimal (or "inf"/"nan") string at working precision.
  explicit BigScalar(std::string_view text);

  BigScalar(const BigScalar& other);
  BigScalar(BigScalar&& other) noexcept;
  BigScalar& operator=(const BigScalar& other);
  BigScalar& operator=(BigScalar&& other) noexcept;
  ~BigScalar();

  int precision() const noexcept { return static_cast<int>(mpfr_get_prec(v_)); }
  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
  bool is_nan() const noexcept { return mpfr_nan_p(v_) != 0; }
  int sign() const noexcept { return mpfr_sgn(v_); }
  /// Binary exponent e with value = m * 2^e, 0.5 <= |m| < 1. Undefined for zero.
  long exponent2() const noexcept { return mpfr_get_exp(v_); }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const noexcept { return mpfr_get_si(v_, MPFR_RNDN); }

  /// Decimal scientific notation. digits == 0 gives enough digits for an
  /// exact round trip at this value's precision.
  std::string to_string(int digits = 0) const;

  BigScalar& operator+=(const BigScalar& rhs);
  BigScalar& operator-=(const BigScalar& rhs);
  BigScalar& operator*=(const BigScalar& rhs);
  BigScalar& operator/=(const BigScalar& rhs);

  friend BigScalar operator+(BigScalar lhs, const BigScalar& rhs) { return lhs += rhs; }
  friend BigScalar operator-(BigScalar lhs, const BigScalar& rhs) { return lhs -= rhs; }
  friend BigScalar operator*(BigScalar lhs, const BigScalar& rhs) { return lhs *= rhs; }
  friend BigScalar operator/(BigScalar lhs, const BigScalar& rhs) { return lhs /= rhs; }
  BigScalar operator-() const;

  friend bool operator==(const BigScalar& a, const BigScalar& b) {
    return mpfr_equal_p(a.v_, b.v_) != 0;
  }
  friend std::partial_ordering operator<=>(const BigScalar& a, const BigScalar& b);

  mpfr_srcptr raw() const noexcept { return v_; }
  mpfr_ptr raw() noexcept { return v_; }

  static BigScalar pi();
  static BigScalar ln2();
  /// 2^e exactly.
  static BigScalar pow2(long e);
  static BigScalar infinity(int sign = 1);

 private:
  mpfr_t v_;
};

std::ostream& operator<<(std::ostream& os, const BigScalar& x);

BigScalar abs(const BigScalar& x);
BigScalar sqrt(const BigScalar& x);
BigScalar exp(const BigScalar& x);
BigScalar expm1(const BigScalar& x);
BigScalar log(const BigScalar& x);
/// log(1 + x) without cancellation for small x.
BigScalar log1p(const BigScalar& x);
BigScalar sin(const BigScalar& x);
BigScalar cos(const BigScalar& x);
BigScalar atan(const BigScalar& x);
BigScalar atan2(const BigScalar& y, const BigScalar& x);
BigScalar pow(const BigScalar& x, const BigScalar& y);
BigScalar pow(const BigScalar& x, long n);
BigScalar floor(const BigScalar& x);
BigScalar hypot(const BigScalar& x, const BigScalar& y);
/// x - period * floor(x / period), in [0, period).
BigScalar wrap(const BigScalar& x, const BigScalar& period);
const BigScalar& max(const BigScalar& a, const BigScalar& b);
const BigScalar& min(const BigScalar& a, const BigScalar& b);

/// Unit roundoff at the working precision, 2^-bits.
BigScalar working_epsilon();

}  // namespace bglue::numeric
