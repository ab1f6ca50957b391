#pragma once

#include <compare>
#include <string>

#include "bglue/numeric/big_scalar.hpp"

namespace bglue::numeric {

/// Extended-range real stored as sign and natural log of the magnitude.
///
/// Values such as exp(-exp(1/y)) for small y have no direct binary floating
/// point representation; their log-magnitude does. Products and quotients
/// are exact additions/subtractions of log-magnitudes.
class LogScalar {
 public:
  /// Zero.
  LogScalar() = default;
  /// sign must be -1, 0 or +1; logmag is ignored when sign == 0.
  LogScalar(int sign, BigScalar logmag);

  static LogScalar zero() { return {}; }
  static LogScalar from_logmag(BigScalar logmag) { return {1, std::move(logmag)}; }
  static LogScalar encode(const BigScalar& x);

  int sign() const noexcept { return sign_; }
  bool is_zero() const noexcept { return sign_ == 0; }
  /// Natural log of |value|. Throws DomainError for zero.
  const BigScalar& logmag() const;

  /// exp(logmag) with sign. Underflows to zero (or overflows to infinity)
  /// when the magnitude leaves MPFR's exponent range.
  BigScalar decode() const;

  /// True when decode() is exact to working precision without leaving the
  /// normal MPFR range.
  bool decodable() const;

  LogScalar operator*(const LogScalar& rhs) const;
  LogScalar operator/(const LogScalar& rhs) const;
  LogScalar operator-() const { return {-sign_, sign_ ? logmag_ : BigScalar()}; }
  /// Sum via max-logmag factorization; exact sign handling for cancellation.
  LogScalar operator+(const LogScalar& rhs) const;

  friend bool operator==(const LogScalar& a, const LogScalar& b);
  friend std::partial_ordering operator<=>(const LogScalar& a, const LogScalar& b);

  std::string to_string(int digits = 0) const;

 private:
  int sign_ = 0;
  BigScalar logmag_;
};

}  // namespace bglue::numeric
