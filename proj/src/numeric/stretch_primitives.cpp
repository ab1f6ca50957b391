#include "bglue/numeric/stretch_primitives.hpp"

#include "bglue/errors.hpp"

namespace bglue::numeric {

LogScalar phi(const BigScalar& y) {
  if (!(y.sign() > 0)) throw DomainError("phi: y must be positive, got " + y.to_string(12));
  return LogScalar::from_logmag(-(BigScalar(1) / y));
}

LogScalar phi2(const BigScalar& y) {
  if (!(y.sign() > 0)) throw DomainError("phi2: y must be positive, got " + y.to_string(12));
  BigScalar e = exp(BigScalar(1) / y);
  if (!e.is_finite()) {
    throw RangeError("phi2: exp(1/y) overflows the log-magnitude range at y = " + y.to_string(12));
  }
  return LogScalar::from_logmag(-e);
}

BigScalar phi_inv(const LogScalar& u) {
  if (u.sign() <= 0 || !(u.logmag().sign() < 0)) {
    throw DomainError("phi_inv: argument must lie in (0, 1)");
  }
  return -(BigScalar(1) / u.logmag());
}

BigScalar phi2_inv(const LogScalar& u) {
  if (u.sign() <= 0 || !(u.logmag() < BigScalar(-1))) {
    throw DomainError("phi2_inv: argument must lie in (0, 1/e)");
  }
  return BigScalar(1) / log(-u.logmag());
}

namespace {

BigScalar conjugate_delta(const BigScalar& a, const BigScalar& y) {
  if (!(a.sign() > 0)) throw DomainError("stable_conjugate_linear: a must be positive");
  if (!(y.sign() > 0) || !(y < BigScalar(1))) {
    throw DomainError("stable_conjugate_linear: y must lie in (0, 1)");
  }
  BigScalar la = log(a);
  BigScalar t = la * exp(-(BigScalar(1) / y));  // (log a) e^{-1/y}
  if (!(t < BigScalar(1))) {
    throw DomainError("stable_conjugate_linear: exp(1/y) <= log a");
  }
  return log1p(-t);
}

}  // namespace

BigScalar stable_conjugate_linear(const BigScalar& a, const BigScalar& y) {
  BigScalar delta = conjugate_delta(a, y);
  return y / (BigScalar(1) + y * delta);
}

BigScalar stable_conjugate_linear_offset(const BigScalar& a, const BigScalar& y) {
  BigScalar delta = conjugate_delta(a, y);
  return -(y * y * delta) / (BigScalar(1) + y * delta);
}

}  // namespace bglue::numeric
