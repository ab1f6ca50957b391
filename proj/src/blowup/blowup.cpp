#include "bglue/blowup/blowup.hpp"

#include <random>

#include "bglue/errors.hpp"
#include "bglue/numeric/tolerance.hpp"

namespace bglue::blowup {

using geometry::Chart;
using geometry::chart;
using geometry::matmul;

BlowupSite sphere_site(int sign) {
  if (sign != 1 && sign != -1) throw DomainError("sphere_site: sign must be +-1");
  return {"S2", Vec{BigScalar(sign), BigScalar(0), BigScalar(0)}, sign > 0 ? "ortho+x" : "ortho-x",
          sign > 0 ? "polar+x" : "polar-x"};
}

BlowupSite plane_origin_site() { return {"R2", Vec{BigScalar(0), BigScalar(0)}, "R2", "polar"}; }

Vec blow_down(const Vec& theta, const BigScalar& r) {
  numeric::TolerancePolicy tol{numeric::working_precision()};
  if (abs(geometry::norm2(theta) - BigScalar(1)) > tol.roundtrip_rel()) {
    throw DomainError("blow_down: direction is not a unit vector");
  }
  if (r.sign() < 0) throw DomainError("blow_down: negative radius");
  Vec out = theta;
  for (auto& x : out) x *= r;
  return out;
}

std::pair<Vec, BigScalar> blow_up_pt(const Vec& p) {
  BigScalar r = geometry::norm2(p);
  if (r.is_zero()) throw DomainError("blow_up_pt: the origin blows up to the whole sphere of directions");
  Vec theta = p;
  for (auto& x : theta) x /= r;
  return {theta, r};
}

Matrix origin_derivative(const MapExpr& f, const BlowupSite& site) {
  const Point base = geometry::make_point(site.ambient_chart, site.point);
  const Chart& sc = chart(site.chart);
  const Vec zero(static_cast<size_t>(sc.dim), BigScalar(0));
  if (auto jf = geometry::jacobian(f, base)) {
    if (site.chart == site.ambient_chart) return *jf;
    const Chart& ac = chart(site.ambient_chart);
    if (sc.to_euclid_jacobian && sc.from_euclid_jacobian && ac.to_euclid_jacobian && ac.from_euclid_jacobian) {
      // site chart -> ambient coordinates -> f -> ambient coordinates -> site chart
      Point image = geometry::evaluate(f, base);
      Matrix in = matmul(ac.from_euclid_jacobian(geometry::ambient_of(base)), sc.to_euclid_jacobian(zero));
      Matrix out = matmul(sc.from_euclid_jacobian(geometry::ambient_of(image)),
                          ac.to_euclid_jacobian(image.values()));
      return matmul(out, matmul(*jf, in));
    }
  }
  return geometry::jacobian_fd(geometry::chart_conjugate(site.chart, f), geometry::make_point(site.chart, zero));
}

namespace {

BigScalar centered(const BigScalar& d) {
  BigScalar two_pi = BigScalar::pi() * BigScalar(2);
  return numeric::wrap(d + BigScalar::pi(), two_pi) - BigScalar::pi();
}

class BlowupNode final : public geometry::MapNode {
 public:
  BlowupNode(MapExpr f, std::vector<BlowupSite> sites) : f_(std::move(f)), sites_(std::move(sites)) {
    numeric::TolerancePolicy tol{numeric::working_precision()};
    for (const auto& s : sites_) {
      if (chart(s.chart).dim != 2 || chart(s.polar).dim != 2) {
        throw UnsupportedError("blow-up is implemented for surfaces (2-dimensional charts)");
      }
      Point base = geometry::make_point(s.ambient_chart, s.point);
      Point image = geometry::evaluate(f_, base);
      if (geometry::point_distance(base, image) > tol.path_defect()) {
        throw PreconditionError("induced_map: the map moves the blow-up point " + base.to_string() + " to " +
                                image.to_string());
      }
      Matrix d0 = origin_derivative(f_, s);
      BigScalar det = d0[0][0] * d0[1][1] - d0[0][1] * d0[1][0];
      if (abs(det) <= tol.path_defect()) {
        throw DomainError("induced_map: degenerate derivative at " + base.to_string());
      }
      d0_.push_back(std::move(d0));
    }
  }

  std::string kind() const override { return "blowup"; }
  std::string describe() const override { return "blowup:" + f_.node().describe(); }
  int dim_in() const override { return 0; }
  int dim_out() const override { return 0; }

  Point apply(const Point& p) const override {
    for (size_t k = 0; k < sites_.size(); ++k) {
      const auto& s = sites_[k];
      if (p.chart != s.polar) continue;
      const Vec v = p.values();
      if (v[1].sign() < 0) throw DomainError("node 'blowup': negative radius in " + p.to_string());
      if (v[1].is_zero()) {
        // Boundary rule: normalized derivative acting on the direction.
        Vec theta{cos(v[0]), sin(v[0])};
        Vec w = geometry::matvec(d0_[k], theta);
        return geometry::make_point(s.polar, Vec{atan2(w[1], w[0]), BigScalar(0)});
      }
      Point image = geometry::evaluate(f_, p);
      if (auto q = geometry::try_to_chart(image, s.polar)) return *q;
      return image;
    }
    for (const auto& s : sites_) {
      if (p.chart == s.ambient_chart && geometry::point_distance(p, geometry::make_point(s.ambient_chart, s.point)).is_zero()) {
        throw DomainError("node 'blowup': the blown-up point must be given in its polar chart");
      }
    }
    return geometry::evaluate(f_, p);
  }

  geometry::NodePtr inverse() const override {
    return std::make_shared<BlowupNode>(geometry::invert(f_), sites_);
  }

  json to_json() const override {
    json s = json::array();
    for (const auto& site : sites_) s.push_back(site_to_json(site));
    return {{"kind", "blowup"}, {"map", geometry::to_json(f_)}, {"sites", s}};
  }

 private:
  MapExpr f_;
  std::vector<BlowupSite> sites_;
  std::vector<Matrix> d0_;
};

}  // namespace

MapExpr induced_map(const MapExpr& f, const std::vector<BlowupSite>& sites) {
  return MapExpr(std::make_shared<BlowupNode>(f, sites));
}

FunctorialityReport functoriality_check(const MapExpr& f, const MapExpr& g, const std::vector<BlowupSite>& sites,
                                        int samples, int boundary_samples, std::uint64_t seed) {
  if (sites.empty()) throw DomainError("functoriality_check: no blow-up site");
  MapExpr lhs = induced_map(geometry::compose(f, g), sites);
  MapExpr rhs = geometry::compose(induced_map(f, sites), induced_map(g, sites));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-3.14159, 3.14159);
  std::uniform_real_distribution<double> radius(1e-3, 0.9);
  FunctorialityReport rep;
  const std::string& polar = sites.front().polar;
  for (int i = 0; i < samples + boundary_samples; ++i) {
    const bool boundary = i >= samples;
    Point p = geometry::make_point(polar, Vec{BigScalar(angle(rng)), boundary ? BigScalar(0) : BigScalar(radius(rng))});
    BigScalar d = geometry::point_distance(geometry::evaluate(lhs, p), geometry::evaluate(rhs, p));
    BigScalar& worst = boundary ? rep.boundary_defect : rep.interior_defect;
    if (d > worst) worst = d;
    ++(boundary ? rep.boundary_samples : rep.interior_samples);
  }
  return rep;
}

std::vector<BigScalar> boundary_fixed_points(const MapExpr& induced, const BlowupSite& site, int grid) {
  const BigScalar two_pi = BigScalar::pi() * BigScalar(2);
  auto disp = [&](const BigScalar& t) {
    Point q = geometry::evaluate(induced, geometry::make_point(site.polar, Vec{t, BigScalar(0)}));
    if (q.chart != site.polar) throw DomainError("boundary_fixed_points: boundary not preserved");
    return abs(centered(q.values()[0] - t));
  };
  std::vector<BigScalar> ts, ds;
  for (int i = 0; i < grid; ++i) {
    ts.push_back(-BigScalar::pi() + two_pi * BigScalar(i) / BigScalar(grid));
    ds.push_back(disp(ts.back()));
  }
  const BigScalar accept = BigScalar::pow2(-(numeric::working_precision() / 2));
  const BigScalar step = two_pi / BigScalar(grid);
  std::vector<BigScalar> roots;
  for (int i = 0; i < grid; ++i) {
    const auto& prev = ds[(i + grid - 1) % grid];
    const auto& next = ds[(i + 1) % grid];
    if (ds[i] > prev || ds[i] > next) continue;
    // Golden-section search on |displacement| around the grid minimum.
    BigScalar a = ts[i] - step, b = ts[i] + step;
    const BigScalar g = (sqrt(BigScalar(5)) - BigScalar(1)) / BigScalar(2);
    BigScalar c = b - g * (b - a), d = a + g * (b - a);
    BigScalar fc = disp(c), fd = disp(d);
    for (int it = 0; it < 400 && b - a > accept * accept; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = disp(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = disp(d);
      }
    }
    BigScalar t = (a + b) / BigScalar(2);
    if (ds[i].is_zero()) t = ts[i];
    if (disp(t) > accept) continue;
    t = centered(t);
    bool dup = false;
    for (const auto& r : roots) dup = dup || abs(centered(r - t)) < BigScalar(1e-6);
    if (!dup) roots.push_back(t);
  }
  return roots;
}

json site_to_json(const BlowupSite& s) {
  return {{"ambient_chart", s.ambient_chart},
          {"point", geometry::vec_to_json(s.point)},
          {"chart", s.chart},
          {"polar", s.polar}};
}

BlowupSite site_from_json(const json& j) {
  return {j.at("ambient_chart").get<std::string>(), geometry::vec_from_json(j.at("point")),
          j.at("chart").get<std::string>(), j.at("polar").get<std::string>()};
}

void register_node_kinds() {
  geometry::register_node_kind("blowup", [](const json& j) {
    std::vector<BlowupSite> sites;
    for (const auto& s : j.at("sites")) sites.push_back(site_from_json(s));
    return induced_map(geometry::map_from_json(j.at("map")), sites);
  });
}

}  // namespace bglue::blowup
