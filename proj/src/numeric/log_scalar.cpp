#include "bglue/numeric/log_scalar.hpp"

#include <cmath>

#include "bglue/errors.hpp"

namespace bglue::numeric {

LogScalar::LogScalar(int sign, BigScalar logmag) : sign_(sign), logmag_(std::move(logmag)) {
  if (sign < -1 || sign > 1) throw DomainError("LogScalar sign must be -1, 0 or +1");
  if (sign_ != 0 && !logmag_.is_finite()) {
    if (logmag_.is_nan()) throw DomainError("LogScalar log-magnitude is NaN");
    if (logmag_.sign() < 0) {
      sign_ = 0;  // exp(-inf)
      logmag_ = BigScalar();
    } else {
      throw RangeError("LogScalar log-magnitude overflow");
    }
  }
  if (sign_ == 0) logmag_ = BigScalar();
}

LogScalar LogScalar::encode(const BigScalar& x) {
  if (x.is_nan()) throw DomainError("cannot encode NaN");
  if (x.is_zero()) return {};
  return {x.sign() > 0 ? 1 : -1, log(abs(x))};
}

const BigScalar& LogScalar::logmag() const {
  if (sign_ == 0) throw DomainError("log-magnitude of zero is undefined");
  return logmag_;
}

BigScalar LogScalar::decode() const {
  if (sign_ == 0) return BigScalar(0);
  BigScalar m = exp(logmag_);
  return sign_ > 0 ? m : -m;
}

bool LogScalar::decodable() const {
  if (sign_ == 0) return true;
  // Stay well inside MPFR's default exponent range (about +-2^30 binary digits).
  static const BigScalar kLimit(7.0e8);
  return abs(logmag_) < kLimit;
}

LogScalar LogScalar::operator*(const LogScalar& rhs) const {
  if (sign_ == 0 || rhs.sign_ == 0) return {};
  return {sign_ * rhs.sign_, logmag_ + rhs.logmag_};
}

LogScalar LogScalar::operator/(const LogScalar& rhs) const {
  if (rhs.sign_ == 0) throw DomainError("LogScalar division by zero");
  if (sign_ == 0) return {};
  return {sign_ * rhs.sign_, logmag_ - rhs.logmag_};
}

LogScalar LogScalar::operator+(const LogScalar& rhs) const {
  if (sign_ == 0) return rhs;
  if (rhs.sign_ == 0) return *this;
  const bool lhs_big = logmag_ >= rhs.logmag_;
  const LogScalar& big = lhs_big ? *this : rhs;
  const LogScalar& small = lhs_big ? rhs : *this;
  BigScalar ratio = exp(small.logmag_ - big.logmag_);  // in (0, 1]
  if (big.sign_ == small.sign_) return {big.sign_, big.logmag_ + log1p(ratio)};
  if (ratio == BigScalar(1)) return {};
  return {big.sign_, big.logmag_ + log1p(-ratio)};
}

bool operator==(const LogScalar& a, const LogScalar& b) {
  return a.sign_ == b.sign_ && (a.sign_ == 0 || a.logmag_ == b.logmag_);
}

std::partial_ordering operator<=>(const LogScalar& a, const LogScalar& b) {
  if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
  if (a.sign_ == 0) return std::partial_ordering::equivalent;
  auto c = a.logmag_ <=> b.logmag_;
  if (a.sign_ > 0) return c;
  if (c == std::partial_ordering::less) return std::partial_ordering::greater;
  if (c == std::partial_ordering::greater) return std::partial_ordering::less;
  return c;
}

std::string LogScalar::to_string(int digits) const {
  if (sign_ == 0) return "0";
  return std::string(sign_ < 0 ? "-" : "") + "exp(" + logmag_.to_string(digits) + ")";
}

}  // namespace bglue::numeric
