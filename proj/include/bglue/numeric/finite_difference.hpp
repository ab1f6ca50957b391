#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bglue/numeric/big_scalar.hpp"

namespace bglue::numeric {

enum class Stencil { central, forward, backward };

struct FDConfig {
  int order = 1;
  BigScalar base_step = BigScalar(0.01);
  int richardson_levels = 8;
  int precision_bits = kDefaultPrecisionBits;
  Stencil stencil = Stencil::central;
  /// Below this magnitude an estimate/error pair is never flagged low-confidence.
  BigScalar noise_floor = BigScalar(1e-40);

  /// Throws ParameterError unless order >= 1, base_step > 0, levels >= 2.
  void validate() const;
};

/// Closed interval the stencil must stay inside.
struct Interval {
  BigScalar lo;
  BigScalar hi;
  bool contains(const BigScalar& x) const { return lo <= x && x <= hi; }
};

struct FDResult {
  BigScalar estimate;
  /// Magnitude of the last Richardson correction.
  BigScalar err_estimate;
  bool low_confidence = false;
};

using ScalarFn = std::function<BigScalar(const BigScalar&)>;

/// Order-cfg.order derivative of f at x by finite differences with
/// steps h, h/2, h/4, ... and Richardson extrapolation. Central stencils
/// extrapolate in h^2, one-sided stencils in h. Evaluation happens at
/// cfg.precision_bits.
FDResult fd_derivative(const ScalarFn& f, const BigScalar& x, const FDConfig& cfg,
                       const std::optional<Interval>& domain = std::nullopt);

using VectorFn = std::function<std::vector<BigScalar>(const BigScalar&)>;

/// Componentwise fd_derivative of a vector-valued function; each stencil
/// point is evaluated once for all components.
std::vector<FDResult> fd_derivative_vec(const VectorFn& f, const BigScalar& x, const FDConfig& cfg,
                                       const std::optional<Interval>& domain = std::nullopt);

/// The stencil offsets (in units of h) and weights for a single difference quotient.
struct StencilWeights {
  std::vector<BigScalar> offsets;
  std::vector<BigScalar> weights;
};
StencilWeights stencil_weights(int order, Stencil stencil);

}  // namespace bglue::numeric
