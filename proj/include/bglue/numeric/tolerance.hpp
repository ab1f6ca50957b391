#pragma once

#include "bglue/numeric/big_scalar.hpp"

namespace bglue::numeric {

/// Single source for verification thresholds. Everything scales with the
/// mantissa width so the same checks run at 64 and at 256 bits.
struct TolerancePolicy {
  int precision_bits = kDefaultPrecisionBits;

  /// Relative error allowed on round trips (chart, phi/phi_inv): 2^-(bits-16).
  BigScalar roundtrip_rel() const { return BigScalar::pow2(-(precision_bits - 16)); }

  /// Pointwise defect between two evaluations of the same map along
  /// different expression paths: 2^-(bits/3) (about 2.6e-26 at 256 bits).
  BigScalar path_defect() const { return BigScalar::pow2(-(precision_bits / 3)); }

  /// Seam derivative mismatch below which an order passes.
  BigScalar seam_pass() const { return seam_pass_abs; }
  /// Mismatch above which an order is declared failed (inconclusive in between).
  BigScalar seam_fail() const { return seam_pass_abs * seam_fail_factor; }

  BigScalar seam_pass_abs = BigScalar(1e-8);
  BigScalar seam_rel = BigScalar(0);
  BigScalar seam_fail_factor = BigScalar(1e3);

  /// Seam membership in seam-chart coordinates.
  BigScalar seam_eps = BigScalar(1e-30);

  /// Transverse values below 2^-(4 bits) are carried only as log-magnitudes.
  long tiny_log2() const { return -4L * precision_bits; }
};

}  // namespace bglue::numeric
