#pragma once

#include "bglue/numeric/big_scalar.hpp"
#include "bglue/numeric/log_scalar.hpp"

namespace bglue::numeric {

/// phi(y) = exp(-1/y) for y > 0, the flat stretch profile.
LogScalar phi(const BigScalar& y);

/// phi(phi(y)) = exp(-exp(1/y)).
LogScalar phi2(const BigScalar& y);

/// Inverse of phi on (0, 1): -1 / log(u).
BigScalar phi_inv(const LogScalar& u);

/// Inverse of phi2 on (0, phi2(inf)): 1 / log(-log u).
BigScalar phi2_inv(const LogScalar& u);

/// Transverse coordinate of Phi^-2 g Phi^2 for the linear germ g(x, y) = (x, a y):
/// 1 / log(exp(1/y) - log a), evaluated as y / (1 + y * delta) with
/// delta = log1p(-(log a) exp(-1/y)).
BigScalar stable_conjugate_linear(const BigScalar& a, const BigScalar& y);

/// stable_conjugate_linear(a, y) - y without cancellation: -y^2 delta / (1 + y delta).
BigScalar stable_conjugate_linear_offset(const BigScalar& a, const BigScalar& y);

}  // namespace bglue::numeric
