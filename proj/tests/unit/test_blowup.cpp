#include <doctest.h>

#include "bglue/blowup/blowup.hpp"
#include "bglue/errors.hpp"
#include "bglue/geometry/closed_forms.hpp"
#include "bglue/numeric/tolerance.hpp"

using namespace bglue::blowup;
using bglue::geometry::make_point;
using bglue::geometry::Point;
using bglue::geometry::scalar_graph;
using bglue::numeric::TolerancePolicy;

namespace {

MapExpr diag21() {
  return bglue::geometry::linear_map({{BigScalar(2), BigScalar(0)}, {BigScalar(0), BigScalar(1)}}, "R2");
}

MapExpr heis(int a, int b, int c) { return scalar_graph("sphere_projective", {BigScalar(a), BigScalar(b), BigScalar(c)}); }

BigScalar boundary_angle(const MapExpr& f, const BlowupSite& s, const BigScalar& theta) {
  Point q = evaluate(f, make_point(s.polar, {theta, BigScalar(0)}));
  REQUIRE(q.chart == s.polar);
  CHECK(q.x[1].is_zero());
  return q.x[0].big();
}

BigScalar angle_gap(const BigScalar& a, const BigScalar& b) {
  BigScalar two_pi = BigScalar::pi() * BigScalar(2);
  return abs(bglue::numeric::wrap(a - b + BigScalar::pi(), two_pi) - BigScalar::pi());
}

}  // namespace

TEST_CASE("blow_down and blow_up_pt") {
  Vec d = blow_down({BigScalar(0), BigScalar(1)}, BigScalar(2));
  CHECK(d[0] == BigScalar(0));
  CHECK(d[1] == BigScalar(2));

  auto [theta, r] = blow_up_pt({BigScalar(3), BigScalar(4)});
  CHECK(r == BigScalar(5));
  CHECK(abs(theta[0] - BigScalar("0.6")) < BigScalar(1e-70));
  CHECK(abs(theta[1] - BigScalar("0.8")) < BigScalar(1e-70));

  Vec u{cos(BigScalar("0.9")), sin(BigScalar("0.9"))};
  auto [t2, r2] = blow_up_pt(blow_down(u, BigScalar("0.37")));
  CHECK(abs(r2 - BigScalar("0.37")) < BigScalar(1e-70));
  CHECK(abs(t2[0] - u[0]) < BigScalar(1e-70));

  CHECK_THROWS_AS(blow_down({BigScalar(1), BigScalar(1)}, BigScalar(1)), bglue::DomainError);
  CHECK_THROWS_AS(blow_up_pt({BigScalar(0), BigScalar(0)}), bglue::DomainError);
}

TEST_CASE("normalized derivative on the exceptional circle for diag(2, 1)") {
  BlowupSite s = plane_origin_site();
  MapExpr f = induced_map(diag21(), s);
  CHECK(angle_gap(boundary_angle(f, s, BigScalar(0)), BigScalar(0)) < BigScalar(1e-70));
  const BigScalar half_pi = BigScalar::pi() / BigScalar(2);
  CHECK(angle_gap(boundary_angle(f, s, half_pi), half_pi) < BigScalar(1e-70));
  // (1, 1)/sqrt2 -> (2, 1)/sqrt5.
  BigScalar img = boundary_angle(f, s, BigScalar::pi() / BigScalar(4));
  CHECK(abs(cos(img) - BigScalar(2) / sqrt(BigScalar(5))) < BigScalar(1e-70));
  CHECK(abs(sin(img) - BigScalar(1) / sqrt(BigScalar(5))) < BigScalar(1e-70));
}

TEST_CASE("away from the exceptional circle the induced map is the conjugate by the blow-down") {
  BlowupSite s = plane_origin_site();
  MapExpr f = induced_map(diag21(), s);
  Point q = evaluate(f, make_point("polar", {BigScalar("0.5"), BigScalar("0.3")}));
  BigScalar x = BigScalar(2) * BigScalar("0.3") * cos(BigScalar("0.5"));
  BigScalar y = BigScalar("0.3") * sin(BigScalar("0.5"));
  CHECK(abs(q.x[1].big() - hypot(x, y)) < BigScalar(1e-70));
  CHECK(angle_gap(q.x[0].big(), atan2(y, x)) < BigScalar(1e-70));
}

TEST_CASE("preconditions of induced_map") {
  BlowupSite s = plane_origin_site();
  CHECK_THROWS_AS(induced_map(bglue::geometry::translation_map({BigScalar(1), BigScalar(0)}, "R2"), s),
                  bglue::PreconditionError);
  MapExpr singular = bglue::geometry::linear_map({{BigScalar(1), BigScalar(0)}, {BigScalar(0), BigScalar(0)}}, "R2");
  CHECK_THROWS_AS(induced_map(singular, s), bglue::DomainError);
  MapExpr f = induced_map(diag21(), s);
  CHECK_THROWS_AS(evaluate(f, make_point("R2", {BigScalar(0), BigScalar(0)})), bglue::DomainError);
}

TEST_CASE("origin derivatives of the sphere generators at (1, 0, 0)") {
  BlowupSite s = sphere_site(1);
  for (int b : {0, 1, -2}) {
    Matrix d = origin_derivative(heis(1, b, 3), s);
    CHECK(abs(d[0][0] - BigScalar(1)) < BigScalar(1e-40));
    CHECK(abs(d[0][1] - BigScalar(b)) < BigScalar(1e-40));
    CHECK(abs(d[1][0]) < BigScalar(1e-40));
    CHECK(abs(d[1][1] - BigScalar(1)) < BigScalar(1e-40));
  }
}

TEST_CASE("boundary dynamics of Y on the blown-up sphere") {
  BlowupSite s = sphere_site(1);
  MapExpr y = induced_map(heis(0, 1, 0), s);
  auto fixed = boundary_fixed_points(y, s);
  CHECK(fixed.size() >= 2);
  bool has_zero = false, has_pi = false;
  for (const auto& t : fixed) {
    has_zero = has_zero || angle_gap(t, BigScalar(0)) < BigScalar(1e-6);
    has_pi = has_pi || angle_gap(t, BigScalar::pi()) < BigScalar(1e-6);
  }
  CHECK(has_zero);
  CHECK(has_pi);
  // X has D0 = I: every boundary point is fixed.
  MapExpr x = induced_map(heis(1, 0, 0), s);
  for (const char* t : {"0.3", "1.7", "-2.9"})
    CHECK(angle_gap(boundary_angle(x, s, BigScalar(t)), BigScalar(t)) < BigScalar(1e-40));
}

TEST_CASE("continuity at the exceptional circle") {
  // Projective maps of the sphere keep ortho-chart directions exactly, so use a nonlinear germ.
  BlowupSite s = plane_origin_site();
  MapExpr f = induced_map(scalar_graph("germ_shear", {}), s);
  const BigScalar theta("0.8");
  BigScalar limit = boundary_angle(f, s, theta);
  BigScalar prev = BigScalar(10);
  for (int k = 1; k <= 6; ++k) {
    BigScalar r = pow(BigScalar(10), -k);
    Point q = evaluate(f, make_point(s.polar, {theta, r}));
    REQUIRE(q.chart == s.polar);
    BigScalar gap = angle_gap(q.x[0].big(), limit);
    CHECK(gap < prev);
    CHECK(gap < BigScalar(10) * r);
    prev = gap;
  }
}

TEST_CASE("transverse derivatives exist at the exceptional circle") {
  BlowupSite s = sphere_site(1);
  for (const MapExpr& g : {heis(1, 0, 0), heis(0, 1, 0)}) {
    MapExpr f = induced_map(g, s);
    auto fn = [&](const BigScalar& r) { return evaluate(f, make_point(s.polar, {BigScalar("0.8"), r})).values(); };
    for (int order : {1, 2}) {
      bglue::numeric::FDConfig cfg;
      cfg.order = order;
      cfg.stencil = bglue::numeric::Stencil::forward;
      cfg.base_step = BigScalar("0.01");
      auto d = bglue::numeric::fd_derivative_vec(fn, BigScalar(0), cfg);
      for (const auto& c : d) {
        CHECK(c.estimate.is_finite());
        CHECK(c.err_estimate < BigScalar(1e-8));
      }
    }
  }
}

TEST_CASE("functoriality") {
  BlowupSite s = sphere_site(1);
  auto id = bglue::geometry::identity_map(0);
  CHECK(functoriality_check(id, id, {s}, 20, 20, 1).max_defect() == BigScalar(0));

  TolerancePolicy tol;
  auto rep = functoriality_check(heis(1, 0, 0), heis(0, 1, 0), {s}, 40, 40, 7);
  CHECK(rep.interior_samples == 40);
  CHECK(rep.boundary_samples == 40);
  CHECK(rep.max_defect() < tol.path_defect());

  BlowupSite o = plane_origin_site();
  auto rot = [](const char* a) {
    BigScalar t(a);
    return bglue::geometry::linear_map({{cos(t), -sin(t)}, {sin(t), cos(t)}}, "R2");
  };
  CHECK(functoriality_check(rot("0.4"), rot("1.1"), {o}, 30, 30, 3).max_defect() < tol.path_defect());
}

TEST_CASE("both poles blown up") {
  std::vector<BlowupSite> sites{sphere_site(1), sphere_site(-1)};
  MapExpr y = induced_map(heis(0, 1, 0), sites);
  Point q = evaluate(y, make_point("polar-x", {BigScalar("0.5"), BigScalar(0)}));
  CHECK(q.chart == "polar-x");
  CHECK(q.x[1].is_zero());
  Point far = make_point("S2", {BigScalar(0), BigScalar("0.6"), BigScalar("0.8")});
  CHECK(bglue::geometry::point_distance(evaluate(y, far), evaluate(heis(0, 1, 0), far)) == BigScalar(0));
  json j = bglue::geometry::to_json(y);
  CHECK(bglue::geometry::to_json(bglue::geometry::map_from_json(j)) == j);
}
