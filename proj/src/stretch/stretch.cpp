#include "bglue/stretch/stretch.hpp"

#include "bglue/errors.hpp"
#include "bglue/numeric/stretch_primitives.hpp"

namespace bglue::stretch {

using geometry::Point;
using numeric::working_precision;

namespace {

BigScalar one() { return BigScalar(1); }

Coord negate(const Coord& c) {
  if (c.is_log()) return Coord(-c.log());
  return Coord(-c.big());
}

/// Decoded value of a transverse input; refuses values that only exist in log form.
BigScalar materialize(const Coord& y, const char* who) {
  BigScalar v = y.big();
  if (v.is_zero() && !y.is_zero()) {
    throw RangeError(std::string(who) + ": transverse coordinate " + y.to_string(6) +
                     " is below the representable range for a further stretch");
  }
  return v;
}

}  // namespace

Blend phi_step_blend() {
  Blend b;
  b.name = "phi-step";
  b.b = [](const BigScalar& u) {
    if (u.sign() <= 0) return BigScalar(0);
    if (u >= one()) return one();
    BigScalar s = one() / u - one() / (one() - u);
    return one() / (one() + exp(s));
  };
  b.db = [bf = b.b](const BigScalar& u) {
    if (u.sign() <= 0 || u >= one()) return BigScalar(0);
    BigScalar v = bf(u);
    BigScalar w = one() - u;
    return v * (one() - v) * (one() / (u * u) + one() / (w * w));
  };
  return b;
}

Blend blend_by_name(const std::string& name) {
  if (name == "phi-step") return phi_step_blend();
  throw ParameterError("unknown blend '" + name + "' (available: phi-step)");
}

// ---- ChiProfile --------------------------------------------------------------

ChiProfile::ChiProfile(BigScalar y0, BigScalar y1, Blend blend)
    : y0_(std::move(y0)), y1_(std::move(y1)), blend_(std::move(blend)) {
  if (!(y0_.sign() > 0 && y0_ < y1_ && y1_ < one())) {
    throw DomainError("chi profile needs 0 < y0 < y1 < 1, got y0=" + y0_.to_string(6) + " y1=" + y1_.to_string(6));
  }
}

BigScalar ChiProfile::log_chi(const BigScalar& y) const {
  if (y <= y0_) return -exp(one() / y);
  if (y >= y1_) return log(y);
  BigScalar b = blend_.b((y - y0_) / (y1_ - y0_));
  return -((one() - b) * exp(one() / y)) + b * log(y);
}

ChiProfile::SlopeTerms ChiProfile::slope_terms(const BigScalar& y) const {
  const BigScalar width = y1_ - y0_;
  const BigScalar u = (y - y0_) / width;
  const BigScalar b = blend_.b(u);
  const BigScalar db = blend_.db(u) / width;
  const BigScalar e = exp(one() / y);
  // log phi^2(y) = -e^{1/y}, so (phi^2)'/phi^2 = e^{1/y} / y^2.
  return {(one() - b) * e / (y * y), b / y, db * (log(y) + e)};
}

LogScalar ChiProfile::forward(const Coord& y) const {
  if (y.is_zero()) return LogScalar::zero();
  if (y.sign() < 0) throw DomainError("chi: negative transverse coordinate " + y.to_string(12));
  BigScalar v = materialize(y, "chi");
  if (v >= one()) throw DomainError("chi: transverse coordinate " + v.to_string(12) + " outside [0, 1)");
  if (v <= y0_) return numeric::phi2(v);
  if (v >= y1_) return LogScalar::encode(v);
  return LogScalar::from_logmag(log_chi(v));
}

BigScalar ChiProfile::inverse(const Coord& c) const {
  if (c.is_zero()) return BigScalar(0);
  if (c.sign() < 0) throw DomainError("chi_inv: negative value " + c.to_string(12));
  const LogScalar u = c.log();
  const BigScalar& target = u.logmag();
  if (target >= log(y1_)) {
    BigScalar y = exp(target);
    if (y >= one()) throw DomainError("chi_inv: value " + c.to_string(12) + " outside the range of chi");
    return y;
  }
  if (target <= -exp(one() / y0_)) return numeric::phi2_inv(u);

  // Blend branch: bracket, bisect to 1e-3, then Newton on log chi.
  BigScalar lo = y0_, hi = y1_;
  const BigScalar coarse(1e-3);
  while (hi - lo > coarse) {
    BigScalar mid = (lo + hi) / BigScalar(2);
    if (log_chi(mid) < target) lo = mid;
    else hi = mid;
  }
  BigScalar y = (lo + hi) / BigScalar(2);
  const BigScalar tol = BigScalar::pow2(-(working_precision() - 8));
  for (int it = 0; it < 60; ++it) {
    SlopeTerms s = slope_terms(y);
    BigScalar step = (log_chi(y) - target) / (s.stretch + s.ident + s.mix);
    if (abs(step) <= tol * y) return y - step;
    BigScalar next = y - step;
    if (next < lo || next > hi) next = (lo + hi) / BigScalar(2);
    if (log_chi(next) < target) lo = next;
    else hi = next;
    y = next;
  }
  return y;
}

json ChiProfile::to_json() const {
  return {{"type", "chi"}, {"y0", geometry::scalar_to_json(y0_)}, {"y1", geometry::scalar_to_json(y1_)},
          {"blend", blend_.name}};
}

std::shared_ptr<const ChiProfile> build_chi(const BigScalar& y0, const BigScalar& y1, const Blend& blend,
                                            int grid) {
  auto p = std::make_shared<ChiProfile>(y0, y1, blend);
  const BigScalar width = y1 - y0;
  for (int i = 1; i <= grid; ++i) {
    BigScalar y = y0 + width * BigScalar(i) / BigScalar(grid + 1);
    auto t = p->slope_terms(y);
    if (t.stretch.sign() < 0 || t.ident.sign() < 0 || t.mix.sign() < 0 || !(t.stretch + t.ident).sign()) {
      throw ConstructionError("chi monotonicity certificate failed at y=" + y.to_string(12) + " (blend '" +
                              blend.name + "')");
    }
  }
  return p;
}

LogScalar chi_eval(const ChiProfile& profile, const BigScalar& y) {
  if (!(y.sign() > 0 && y < one())) throw DomainError("chi_eval: y=" + y.to_string(12) + " outside (0, 1)");
  return profile.forward(Coord(y));
}

BigScalar chi_inv(const ChiProfile& profile, const LogScalar& u) {
  if (u.sign() <= 0) throw DomainError("chi_inv: value must be positive");
  return profile.inverse(Coord(u));
}

// ---- PhiPower ------------------------------------------------------------------

PhiPower::PhiPower(int k) : k_(k) {
  if (k != 1 && k != 2) throw ParameterError("phi power must be 1 or 2");
}

LogScalar PhiPower::forward(const Coord& y) const {
  if (y.is_zero()) return LogScalar::zero();
  if (y.sign() < 0) throw DomainError(name() + ": negative transverse coordinate");
  BigScalar v = materialize(y, "phi");
  return k_ == 1 ? numeric::phi(v) : numeric::phi2(v);
}

BigScalar PhiPower::inverse(const Coord& u) const {
  if (u.is_zero()) return BigScalar(0);
  return k_ == 1 ? numeric::phi_inv(u.log()) : numeric::phi2_inv(u.log());
}

ProfilePtr profile_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "chi") {
    return build_chi(geometry::scalar_from_json(j.at("y0")), geometry::scalar_from_json(j.at("y1")),
                     blend_by_name(j.value("blend", std::string("phi-step"))));
  }
  if (type == "phi_power") return std::make_shared<PhiPower>(j.at("k").get<int>());
  throw ParameterError("unknown profile type '" + type + "'");
}

// ---- stretch node --------------------------------------------------------------

namespace {

class StretchNode final : public geometry::MapNode {
 public:
  StretchNode(ProfilePtr profile, int coord, int dim, int side, bool inverse)
      : profile_(std::move(profile)), coord_(coord), dim_(dim), side_(side), inverse_(inverse) {
    if (coord_ < 0 || coord_ >= dim_) throw DomainError("stretch: coordinate index out of range");
    if (side_ != 1 && side_ != -1) throw DomainError("stretch: side must be +-1");
  }
  std::string kind() const override { return "stretch"; }
  std::string describe() const override {
    return std::string("stretch:") + profile_->name() + (inverse_ ? "^-1" : "");
  }
  int dim_in() const override { return dim_; }
  int dim_out() const override { return dim_; }
  bool handles_tiny() const override { return true; }

  Point apply(const Point& p) const override {
    Point out = p;
    Coord y = p.x[static_cast<size_t>(coord_)];
    if (side_ < 0) y = negate(y);
    Coord v = inverse_ ? Coord(profile_->inverse(y)) : Coord(profile_->forward(y));
    out.x[static_cast<size_t>(coord_)] = side_ < 0 ? negate(v) : v;
    return out;
  }
  geometry::NodePtr inverse() const override {
    return std::make_shared<StretchNode>(profile_, coord_, dim_, side_, !inverse_);
  }
  json to_json() const override {
    return {{"kind", "stretch"}, {"profile", profile_->to_json()}, {"coord", coord_},
            {"dim", dim_},       {"side", side_},                  {"inverse", inverse_}};
  }

 private:
  ProfilePtr profile_;
  int coord_, dim_, side_;
  bool inverse_;
};

}  // namespace

MapExpr stretch_map(ProfilePtr profile, int coord, int dim, int side) {
  return MapExpr(std::make_shared<StretchNode>(std::move(profile), coord, dim, side, false));
}

void register_node_kinds() {
  geometry::register_node_kind("stretch", [](const json& j) {
    auto node = std::make_shared<StretchNode>(profile_from_json(j.at("profile")), j.at("coord").get<int>(),
                                              j.at("dim").get<int>(), j.value("side", 1),
                                              j.value("inverse", false));
    return MapExpr(node);
  });
}

// ---- Psi -------------------------------------------------------------------------

CollarSpec collar_of(const geometry::ManifoldModel& model, const std::string& component) {
  const auto& b = model.component(component);
  CollarSpec c;
  c.piece = model.id;
  c.component = component;
  c.chart = b.chart;
  c.tangential = b.tangential;
  c.transverse = b.transverse;
  // Two collars of the flat annulus share the unit interval.
  c.depth = model.id == "annulus" ? BigScalar(0.5) : one();
  return c;
}

MapExpr build_psi(const CollarSpec& collar, ProfilePtr profile) {
  if (auto chi = std::dynamic_pointer_cast<const ChiProfile>(profile)) {
    if (chi->y1() >= collar.depth) {
      throw ConstructionError("profile y1=" + chi->y1().to_string(6) + " is not below the collar depth " +
                              collar.depth.to_string(6) + " of " + collar.piece + "/" + collar.component);
    }
  }
  const int dim = geometry::chart(collar.chart).dim;
  geometry::Region region;
  region.chart = collar.chart;
  region.coord = collar.transverse;
  const int side = collar.side == Side::plus ? 1 : -1;
  if (side > 0) {
    region.lo = BigScalar(0);
    region.hi = collar.depth;
  } else {
    region.lo = -collar.depth;
    region.hi = BigScalar(0);
    region.hi_closed = true;
  }
  MapExpr inner = geometry::chart_conjugate(collar.chart, stretch_map(std::move(profile), collar.transverse, dim, side));
  return geometry::piecewise({{region, inner}}, geometry::identity_map(0));
}

MapExpr conjugate(const MapExpr& f, const MapExpr& psi) {
  return geometry::compose(geometry::invert(psi), geometry::compose(f, psi));
}

StretchMaps build_stretch_maps(const CollarSpec& c1, const CollarSpec& c2, const MapExpr& alpha,
                               ProfilePtr profile) {
  StretchMaps m;
  m.X1 = stretch_map(profile, 1, 2, 1);
  geometry::Matrix minus{{BigScalar(-1)}};
  MapExpr a = geometry::product(alpha, geometry::linear_map(minus));
  m.X2 = geometry::compose(a, geometry::compose(m.X1, geometry::invert(a)));
  m.Psi1 = build_psi(c1, profile);
  m.Psi2 = build_psi(c2, profile);
  return m;
}

}  // namespace bglue::stretch
