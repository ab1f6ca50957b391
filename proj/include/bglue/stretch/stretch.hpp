#pragma once

#include <functional>
#include <memory>
#include <string>

#include "bglue/geometry/manifold.hpp"
#include "bglue/geometry/map_expr.hpp"

namespace bglue::stretch {

using geometry::Coord;
using geometry::json;
using geometry::MapExpr;
using numeric::BigScalar;
using numeric::LogScalar;

/// Monotone map of the transverse coordinate fixing 0.
class TransverseProfile {
 public:
  virtual ~TransverseProfile() = default;
  virtual std::string name() const = 0;
  /// Image of y >= 0, always in log form.
  virtual LogScalar forward(const Coord& y) const = 0;
  virtual BigScalar inverse(const Coord& u) const = 0;
  virtual json to_json() const = 0;
};

using ProfilePtr = std::shared_ptr<const TransverseProfile>;

/// Smooth step on [0, 1] with its derivative.
struct Blend {
  std::string name;
  std::function<BigScalar(const BigScalar& u)> b;
  std::function<BigScalar(const BigScalar& u)> db;
};

/// b(u) = phi(u) / (phi(u) + phi(1 - u)), flat at both ends.
Blend phi_step_blend();
/// Named blend ("phi-step"); ParameterError for unknown names.
Blend blend_by_name(const std::string& name);

/// chi = phi^2 on (0, y0], identity on [y1, 1), and
/// log chi = (1 - b) log phi^2 + b log y in between.
class ChiProfile final : public TransverseProfile {
 public:
  ChiProfile(BigScalar y0, BigScalar y1, Blend blend);

  std::string name() const override { return "chi"; }
  LogScalar forward(const Coord& y) const override;
  BigScalar inverse(const Coord& u) const override;
  json to_json() const override;

  const BigScalar& y0() const { return y0_; }
  const BigScalar& y1() const { return y1_; }
  const Blend& blend() const { return blend_; }

  /// log chi(y) for y in (0, 1).
  BigScalar log_chi(const BigScalar& y) const;
  /// The three terms of d/dy log chi on the blend interval.
  struct SlopeTerms {
    BigScalar stretch;  ///< (1 - b) (phi^2)' / phi^2
    BigScalar ident;    ///< b / y
    BigScalar mix;      ///< b' (log y - log phi^2)
  };
  SlopeTerms slope_terms(const BigScalar& y) const;

 private:
  BigScalar y0_, y1_;
  Blend blend_;
};

/// phi^k for k = 1 or 2 (the maps Phi and Phi^2 of the transverse coordinate).
class PhiPower final : public TransverseProfile {
 public:
  explicit PhiPower(int k);
  std::string name() const override { return "phi^" + std::to_string(k_); }
  LogScalar forward(const Coord& y) const override;
  BigScalar inverse(const Coord& u) const override;
  json to_json() const override { return {{"type", "phi_power"}, {"k", k_}}; }
  int k() const { return k_; }

 private:
  int k_;
};

/// Builds and certifies a chi profile: monotonicity is checked term by term
/// on `grid` points of the blend interval. ConstructionError on failure.
std::shared_ptr<const ChiProfile> build_chi(const BigScalar& y0, const BigScalar& y1,
                                            const Blend& blend = phi_step_blend(), int grid = 1000);
LogScalar chi_eval(const ChiProfile& profile, const BigScalar& y);
BigScalar chi_inv(const ChiProfile& profile, const LogScalar& u);

ProfilePtr profile_from_json(const json& j);

/// (.., y, ..) -> (.., side * profile(side * y), ..) on coordinate `coord`.
MapExpr stretch_map(ProfilePtr profile, int coord, int dim, int side = 1);

enum class Side { plus, minus };

struct CollarSpec {
  std::string piece;      ///< manifold model id
  std::string component;  ///< boundary component name
  std::string chart;      ///< collar chart (component x [0, depth) or (-depth, 0])
  int tangential = 0;
  int transverse = 1;
  BigScalar depth = BigScalar(1);
  Side side = Side::plus;
};

CollarSpec collar_of(const geometry::ManifoldModel& model, const std::string& component);

/// Psi = eta^-1 X eta inside the collar, identity outside.
MapExpr build_psi(const CollarSpec& collar, ProfilePtr profile);

/// Psi^-1 o f o Psi.
MapExpr conjugate(const MapExpr& f, const MapExpr& psi);

struct StretchMaps {
  MapExpr X1, X2, Psi1, Psi2;
};

/// X1(x, y) = (x, chi(y)) on collar coordinates, X2 = (alpha x -id) X1 (alpha x -id)^-1,
/// Psi_i from the two collars. `alpha` acts on the tangential coordinate.
StretchMaps build_stretch_maps(const CollarSpec& c1, const CollarSpec& c2, const MapExpr& alpha,
                               ProfilePtr profile);

void register_node_kinds();

}  // namespace bglue::stretch
