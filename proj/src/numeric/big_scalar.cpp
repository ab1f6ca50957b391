#include "bglue/numeric/big_scalar.hpp"

#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>

#include "bglue/errors.hpp"

namespace bglue::numeric {

namespace {

thread_local int g_working_precision = kDefaultPrecisionBits;

mpfr_prec_t wp() { return static_cast<mpfr_prec_t>(g_working_precision); }

}  // namespace

int working_precision() noexcept { return g_working_precision; }

PrecisionScope::PrecisionScope(int bits) : saved_(g_working_precision) {
  if (bits < MPFR_PREC_MIN || bits > (1 << 20)) {
    throw ParameterError("precision out of range: " + std::to_string(bits));
  }
  g_working_precision = bits;
}

PrecisionScope::~PrecisionScope() { g_working_precision = saved_; }

BigScalar::BigScalar() {
  mpfr_init2(v_, wp());
  mpfr_set_zero(v_, 1);
}

BigScalar::BigScalar(double v) {
  mpfr_init2(v_, wp());
  mpfr_set_d(v_, v, MPFR_RNDN);
}

BigScalar::BigScalar(int v) {
  mpfr_init2(v_, wp());
  mpfr_set_si(v_, v, MPFR_RNDN);
}

BigScalar::BigScalar(long v) {
  mpfr_init2(v_, wp());
  mpfr_set_si(v_, v, MPFR_RNDN);
}

BigScalar::BigScalar(std::string_view text) {
  mpfr_init2(v_, wp());
  std::string s(text);
  char* end = nullptr;
  mpfr_strtofr(v_, s.c_str(), &end, 10, MPFR_RNDN);
  if (s.empty() || end == nullptr || *end != '\0') {
    mpfr_clear(v_);
    throw ParameterError("not a decimal number: '" + s + "'");
  }
}

BigScalar::BigScalar(const BigScalar& other) {
  mpfr_init2(v_, mpfr_get_prec(other.v_));
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigScalar::BigScalar(BigScalar&& other) noexcept {
  // Steal the limbs; leave `other` as a valid 2-bit zero.
  *v_ = *other.v_;
  mpfr_init2(other.v_, MPFR_PREC_MIN);
  mpfr_set_zero(other.v_, 1);
}

BigScalar& BigScalar::operator=(const BigScalar& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigScalar& BigScalar::operator=(BigScalar&& other) noexcept {
  if (this != &other) mpfr_swap(v_, other.v_);
  return *this;
}

BigScalar::~BigScalar() { mpfr_clear(v_); }

std::string BigScalar::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  if (mpfr_zero_p(v_)) return "0";
  mpfr_exp_t exp10 = 0;
  char* raw = mpfr_get_str(nullptr, &exp10, 10, static_cast<size_t>(digits), v_, MPFR_RNDN);
  std::string mant(raw);
  mpfr_free_str(raw);
  std::string sign;
  if (mant[0] == '-') {
    sign = "-";
    mant.erase(0, 1);
  }
  // mant = d1 d2 d3 ... with value 0.d1d2d3 * 10^exp10
  std::string out = sign + mant.substr(0, 1);
  if (mant.size() > 1) out += "." + mant.substr(1);
  out += "e" + std::to_string(static_cast<long>(exp10) - 1);
  return out;
}

BigScalar& BigScalar::operator+=(const BigScalar& rhs) {
  BigScalar r;
  mpfr_add(r.v_, v_, rhs.v_, MPFR_RNDN);
  return *this = std::move(r);
}

BigScalar& BigScalar::operator-=(const BigScalar& rhs) {
  BigScalar r;
  mpfr_sub(r.v_, v_, rhs.v_, MPFR_RNDN);
  return *this = std::move(r);
}

BigScalar& BigScalar::operator*=(const BigScalar& rhs) {
  BigScalar r;
  mpfr_mul(r.v_, v_, rhs.v_, MPFR_RNDN);
  return *this = std::move(r);
}

BigScalar& BigScalar::operator/=(const BigScalar& rhs) {
  BigScalar r;
  mpfr_div(r.v_, v_, rhs.v_, MPFR_RNDN);
  return *this = std::move(r);
}

BigScalar BigScalar::operator-() const {
  BigScalar r;
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const BigScalar& a, const BigScalar& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

BigScalar BigScalar::pi() {
  BigScalar r;
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

BigScalar BigScalar::ln2() {
  BigScalar r;
  mpfr_const_log2(r.v_, MPFR_RNDN);
  return r;
}

BigScalar BigScalar::pow2(long e) {
  BigScalar r(1);
  mpfr_mul_2si(r.v_, r.v_, e, MPFR_RNDN);
  return r;
}

BigScalar BigScalar::infinity(int sign) {
  BigScalar r;
  mpfr_set_inf(r.v_, sign);
  return r;
}

std::ostream& operator<<(std::ostream& os, const BigScalar& x) {
  return os << x.to_string(static_cast<int>(os.precision()) > 0 ? static_cast<int>(os.precision()) : 0);
}

namespace {

template <class Fn>
BigScalar unary(const BigScalar& x, Fn fn) {
  BigScalar r;
  fn(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

}  // namespace

BigScalar abs(const BigScalar& x) { return unary(x, mpfr_abs); }
BigScalar sqrt(const BigScalar& x) { return unary(x, mpfr_sqrt); }
BigScalar exp(const BigScalar& x) { return unary(x, mpfr_exp); }
BigScalar expm1(const BigScalar& x) { return unary(x, mpfr_expm1); }
BigScalar log(const BigScalar& x) { return unary(x, mpfr_log); }
BigScalar log1p(const BigScalar& x) { return unary(x, mpfr_log1p); }
BigScalar sin(const BigScalar& x) { return unary(x, mpfr_sin); }
BigScalar cos(const BigScalar& x) { return unary(x, mpfr_cos); }
BigScalar atan(const BigScalar& x) { return unary(x, mpfr_atan); }
BigScalar floor(const BigScalar& x) {
  BigScalar r;
  mpfr_floor(r.raw(), x.raw());
  return r;
}

BigScalar atan2(const BigScalar& y, const BigScalar& x) {
  BigScalar r;
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}

BigScalar hypot(const BigScalar& x, const BigScalar& y) {
  BigScalar r;
  mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}

BigScalar pow(const BigScalar& x, const BigScalar& y) {
  BigScalar r;
  mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}

BigScalar pow(const BigScalar& x, long n) {
  BigScalar r;
  mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
  return r;
}

BigScalar wrap(const BigScalar& x, const BigScalar& period) {
  BigScalar r = x - period * floor(x / period);
  // Rounding can land exactly on `period`.
  if (r >= period) r -= period;
  if (r.sign() < 0) r = BigScalar(0);
  return r;
}

const BigScalar& max(const BigScalar& a, const BigScalar& b) { return a < b ? b : a; }
const BigScalar& min(const BigScalar& a, const BigScalar& b) { return b < a ? b : a; }

BigScalar working_epsilon() { return BigScalar::pow2(-working_precision()); }

}  // namespace bglue::numeric
