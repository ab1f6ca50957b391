#include "bglue/numeric/finite_difference.hpp"

#include <string>

#include "bglue/errors.hpp"

namespace bglue::numeric {

void FDConfig::validate() const {
  if (order < 1) throw ParameterError("FDConfig: order must be >= 1");
  if (!(base_step.sign() > 0)) throw ParameterError("FDConfig: base_step must be positive");
  if (richardson_levels < 2) throw ParameterError("FDConfig: richardson_levels must be >= 2");
  if (precision_bits < 16) throw ParameterError("FDConfig: precision_bits must be >= 16");
}

StencilWeights stencil_weights(int order, Stencil stencil) {
  // k-th forward/central difference: sum_j (-1)^j C(k, j) f(x + o_j h).
  StencilWeights w;
  BigScalar binom(1);
  for (int j = 0; j <= order; ++j) {
    if (j > 0) binom = binom * BigScalar(order - j + 1) / BigScalar(j);
    BigScalar sgn((j % 2 == 0) ? 1 : -1);
    BigScalar off;
    switch (stencil) {
      case Stencil::central:
        off = BigScalar(order) / BigScalar(2) - BigScalar(j);
        break;
      case Stencil::forward:
        off = BigScalar(order - j);
        break;
      case Stencil::backward:
        off = -BigScalar(j);
        break;
    }
    w.offsets.push_back(off);
    w.weights.push_back(sgn * binom);
  }
  return w;
}

std::vector<FDResult> fd_derivative_vec(const VectorFn& f, const BigScalar& x, const FDConfig& cfg,
                                       const std::optional<Interval>& domain) {
  cfg.validate();
  PrecisionScope scope(cfg.precision_bits);
  const StencilWeights w = stencil_weights(cfg.order, cfg.stencil);
  const int levels = cfg.richardson_levels;
  const bool even_series = cfg.stencil == Stencil::central;

  // Stencil bounds at the largest step.
  if (domain) {
    for (const auto& off : w.offsets) {
      BigScalar p = x + off * cfg.base_step;
      if (!domain->contains(p)) {
        throw DomainError("fd_derivative: stencil point " + p.to_string(12) +
                          " leaves the domain [" + domain->lo.to_string(12) + ", " +
                          domain->hi.to_string(12) + "]");
      }
    }
  }

  // Richardson tableau per component, row i uses step h / 2^i.
  size_t ncomp = 0;
  std::vector<std::vector<std::vector<BigScalar>>> table;
  BigScalar h = cfg.base_step;
  for (int i = 0; i < levels; ++i) {
    std::vector<BigScalar> acc;
    for (size_t j = 0; j < w.offsets.size(); ++j) {
      std::vector<BigScalar> v = f(x + w.offsets[j] * h);
      if (acc.empty()) {
        if (ncomp == 0) {
          ncomp = v.size();
          table.assign(ncomp, std::vector<std::vector<BigScalar>>(static_cast<size_t>(levels)));
        }
        acc.assign(ncomp, BigScalar(0));
      }
      if (v.size() != ncomp) throw DomainError("fd_derivative: function changed output dimension");
      for (size_t c = 0; c < ncomp; ++c) acc[c] += w.weights[j] * v[c];
    }
    const BigScalar hk = pow(h, cfg.order);
    for (size_t c = 0; c < ncomp; ++c) {
      auto& t = table[c];
      t[i].push_back(acc[c] / hk);
      for (int m = 1; m <= i; ++m) {
        // Error terms h^(p m) with p = 2 (central) or 1 (one-sided).
        BigScalar factor = BigScalar::pow2(even_series ? 2 * m : m) - BigScalar(1);
        const BigScalar& fine = t[i][m - 1];
        const BigScalar& coarse = t[i - 1][m - 1];
        t[i].push_back(fine + (fine - coarse) / factor);
      }
    }
    h = h / BigScalar(2);
  }

  std::vector<FDResult> out(ncomp);
  for (size_t c = 0; c < ncomp; ++c) {
    const auto& last = table[c].back();
    FDResult& r = out[c];
    r.estimate = last.back();
    r.err_estimate = abs(last.back() - last[last.size() - 2]);
    r.low_confidence = r.err_estimate > abs(r.estimate) && abs(r.estimate) > cfg.noise_floor &&
                       r.err_estimate > cfg.noise_floor;
  }
  return out;
}

FDResult fd_derivative(const ScalarFn& f, const BigScalar& x, const FDConfig& cfg,
                       const std::optional<Interval>& domain) {
  auto v = fd_derivative_vec([&](const BigScalar& t) { return std::vector<BigScalar>{f(t)}; }, x, cfg,
                             domain);
  return v.front();
}

}  // namespace bglue::numeric
