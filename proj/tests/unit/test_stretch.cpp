#include <doctest.h>

#include <random>

#include "bglue/errors.hpp"
#include "bglue/geometry/closed_forms.hpp"
#include "bglue/numeric/stretch_primitives.hpp"
#include "bglue/numeric/tolerance.hpp"
#include "bglue/stretch/stretch.hpp"

using namespace bglue::stretch;
using bglue::geometry::make_point;
using bglue::geometry::Matrix;
using bglue::geometry::Point;
using bglue::numeric::TolerancePolicy;

namespace {

BigScalar rel(const BigScalar& a, const BigScalar& b) { return abs(a - b) / abs(b); }

std::shared_ptr<const ChiProfile> default_chi() { return build_chi(BigScalar("0.2"), BigScalar("0.8")); }

Point collar_pt(const char* theta, const char* s) { return make_point("disk_collar", {BigScalar(theta), BigScalar(s)}); }

}  // namespace

TEST_CASE("chi on its three branches") {
  auto chi = default_chi();
  TolerancePolicy tol;
  LogScalar a = chi_eval(*chi, BigScalar("0.1"));
  CHECK(rel(a.logmag(), -exp(BigScalar(10))) < tol.roundtrip_rel());
  CHECK(abs(a.logmag() + BigScalar("22026.465794806716516957900645284")) < BigScalar(1e-25));

  LogScalar b = chi_eval(*chi, BigScalar("0.2"));
  CHECK(rel(b.logmag(), -exp(BigScalar(5))) < tol.roundtrip_rel());

  CHECK(abs(chi_eval(*chi, BigScalar("0.9")).decode() - BigScalar("0.9")) < tol.roundtrip_rel());
  CHECK(abs(chi_eval(*chi, BigScalar("0.8")).decode() - BigScalar("0.8")) < tol.roundtrip_rel());

  CHECK_THROWS_AS(chi_eval(*chi, BigScalar(0)), bglue::DomainError);
  CHECK_THROWS_AS(chi_eval(*chi, BigScalar("1.5")), bglue::DomainError);
}

TEST_CASE("chi is continuous in log domain at y0 and y1") {
  auto chi = default_chi();
  const BigScalar eps = BigScalar::pow2(-60);
  for (const BigScalar& y : {chi->y0(), chi->y1()}) {
    BigScalar below = chi->log_chi(y - eps), above = chi->log_chi(y + eps);
    CHECK(abs(above - below) < BigScalar(1e-10) * (abs(below) + BigScalar(1)));
    CHECK(above > below);
  }
}

TEST_CASE("chi_inv round trips on every branch") {
  auto chi = default_chi();
  TolerancePolicy tol;
  for (const char* s : {"0.03", "0.1", "0.19", "0.2", "0.21", "0.3", "0.5", "0.7", "0.79", "0.8", "0.95"}) {
    BigScalar y(s);
    CAPTURE(std::string(s));
    CHECK(rel(chi_inv(*chi, chi_eval(*chi, y)), y) < tol.roundtrip_rel());
  }
  // phi^2 branch: 1 / log(-log u) twice undoes e^{-e^{1/y}}.
  LogScalar u = LogScalar::from_logmag(-exp(BigScalar(10)));
  CHECK(rel(chi_inv(*chi, u), BigScalar("0.1")) < tol.roundtrip_rel());
  CHECK_THROWS_AS(chi_inv(*chi, LogScalar::encode(BigScalar(2))), bglue::DomainError);
}

TEST_CASE("chi is strictly increasing on a fine grid") {
  auto chi = default_chi();
  BigScalar prev = chi->log_chi(BigScalar("0.01"));
  for (int i = 11; i < 1000; ++i) {
    BigScalar cur = chi->log_chi(BigScalar(i) / BigScalar(1000));
    REQUIRE(cur > prev);
    prev = cur;
  }
}

TEST_CASE("monotonicity certificate rejects a non-monotone blend") {
  Blend bad;
  bad.name = "dip";
  // b' < 0 near both ends.
  bad.b = [](const BigScalar& u) { return u - sin(u * BigScalar::pi() * BigScalar(2)) * BigScalar("0.3"); };
  bad.db = [](const BigScalar& u) {
    return BigScalar(1) - cos(u * BigScalar::pi() * BigScalar(2)) * BigScalar::pi() * BigScalar("0.6");
  };
  CHECK_THROWS_AS(build_chi(BigScalar("0.2"), BigScalar("0.8"), bad), bglue::ConstructionError);
  CHECK_THROWS_AS(build_chi(BigScalar("0.8"), BigScalar("0.2")), bglue::DomainError);
  CHECK_THROWS_AS(blend_by_name("cubic"), bglue::ParameterError);
}

TEST_CASE("psi holds the boundary and is the identity outside the stretch") {
  auto chi = default_chi();
  CollarSpec c = collar_of(bglue::geometry::disk_model(), "S1");
  MapExpr psi = build_psi(c, chi);

  Point b = collar_pt("1.25", "0");
  Point pb = evaluate(psi, b);
  CHECK(pb.x[1].is_zero());
  CHECK(pb.x[0].big() == BigScalar("1.25"));

  Point far = collar_pt("0.5", "0.9");
  CHECK(bglue::geometry::point_distance(evaluate(psi, far), far) == BigScalar(0));

  Point centre = make_point("disk", {BigScalar(0), BigScalar(0)});
  Point pc = evaluate(psi, centre);
  CHECK(bglue::geometry::point_distance(pc, centre) == BigScalar(0));

  Point inside = collar_pt("0.5", "0.1");
  Point pi = evaluate(psi, inside);
  REQUIRE(pi.x[1].is_log());
  CHECK(rel(pi.x[1].log().logmag(), -exp(BigScalar(10))) < TolerancePolicy{}.roundtrip_rel());

  CollarSpec shallow = collar_of(bglue::geometry::annulus_model(), "inner");
  CHECK_THROWS_AS(build_psi(shallow, chi), bglue::ConstructionError);
}

TEST_CASE("conjugating the identity gives the identity") {
  auto chi = default_chi();
  MapExpr psi = build_psi(collar_of(bglue::geometry::disk_model(), "S1"), chi);
  MapExpr id = conjugate(bglue::geometry::identity_map(0), psi);
  for (const char* s : {"0.01", "0.1", "0.3", "0.6", "0.95"}) {
    Point p = collar_pt("2", s);
    CHECK(bglue::geometry::point_distance(evaluate(id, p), p) < TolerancePolicy{}.path_defect());
  }
}

TEST_CASE("conjugating the collar germ (x, 2y)") {
  auto chi = default_chi();
  MapExpr psi = build_psi(collar_of(bglue::geometry::disk_model(), "S1"), chi);
  Matrix m{{BigScalar(1), BigScalar(0)}, {BigScalar(0), BigScalar(2)}};
  MapExpr g = conjugate(bglue::geometry::linear_map(m, "disk_collar"), psi);
  Point q = evaluate(g, collar_pt("0.7", "0.1"));
  BigScalar want = bglue::numeric::stable_conjugate_linear(BigScalar(2), BigScalar("0.1"));
  CHECK(rel(q.x[1].big(), want) < TolerancePolicy{}.roundtrip_rel());
  CHECK(abs(q.x[1].big() - BigScalar("0.1") - BigScalar("3.1469427498783984e-7")) < BigScalar(1e-22));
  CHECK(q.x[0].big() == BigScalar("0.7"));
}

TEST_CASE("one Phi-conjugation of (x, y h) is y / (1 - y log h(x, phi(y)))") {
  // h(x, y) = 2 + sin(x) + y.
  bglue::geometry::ClosedForm form;
  form.name = "test_scaled_germ";
  form.dim = 2;
  form.chart = [](const bglue::geometry::Vec&) { return std::string("R2"); };
  form.eval = [](const bglue::geometry::Vec&, const bglue::geometry::Vec& v) {
    return bglue::geometry::Vec{v[0], v[1] * (BigScalar(2) + sin(v[0]) + v[1])};
  };
  bglue::geometry::register_closed_form(form);
  MapExpr phi = stretch_map(std::make_shared<PhiPower>(1), 1, 2);
  MapExpr conj = conjugate(bglue::geometry::scalar_graph("test_scaled_germ", {}), phi);
  TolerancePolicy tol;
  for (const char* xs : {"-1", "0", "0.4", "2"}) {
    for (const char* ys : {"0.02", "0.05", "0.1", "0.2"}) {
      BigScalar x(xs), y(ys);
      Point out = evaluate(conj, make_point("R2", {x, y}));
      BigScalar h = BigScalar(2) + sin(x) + bglue::numeric::phi(y).decode();
      BigScalar want = y / (BigScalar(1) - y * log(h));
      CAPTURE(xs);
      CAPTURE(ys);
      CHECK(rel(out.x[1].big(), want) < tol.roundtrip_rel());
    }
  }
}

TEST_CASE("conjugation is a homomorphism") {
  auto chi = default_chi();
  MapExpr psi = build_psi(collar_of(bglue::geometry::disk_model(), "S1"), chi);
  std::vector<MapExpr> maps = {bglue::geometry::scalar_graph("disk_rotation", {BigScalar("0.7")}),
                               bglue::geometry::scalar_graph("disk_moebius", {BigScalar("0.3")}),
                               bglue::geometry::scalar_graph("disk_moebius", {BigScalar("-0.45")})};
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> th(-3.1, 3.1), s(0.02, 0.95);
  BigScalar worst;
  int samples = 0;
  for (size_t i = 0; i < maps.size(); ++i)
    for (size_t j = 0; j < maps.size(); ++j)
      for (int k = 0; k < 12; ++k) {
        Point p = make_point("disk_collar", {BigScalar(th(rng)), BigScalar(s(rng))});
        Point a = evaluate(conjugate(compose(maps[i], maps[j]), psi), p);
        Point b = evaluate(conjugate(maps[i], psi), evaluate(conjugate(maps[j], psi), p));
        worst = max(worst, bglue::geometry::point_distance(a, b));
        ++samples;
      }
  CHECK(samples >= 100);
  CHECK(worst < TolerancePolicy{}.path_defect());
}

TEST_CASE("X2 is X1 conjugated by alpha x -id") {
  auto chi = default_chi();
  auto disk = bglue::geometry::disk_model();
  CollarSpec c1 = collar_of(disk, "S1");
  CollarSpec c2 = c1;
  c2.side = Side::minus;
  MapExpr alpha = bglue::geometry::translation_map({BigScalar("0.25")});
  StretchMaps m = build_stretch_maps(c1, c2, alpha, chi);
  json j = to_json(m.X2);
  CHECK(j["kind"] == "composition");
  CHECK(j.dump().find("\"stretch\"") != std::string::npos);

  // X2(t, -y) = (t, -chi(y)) since the alpha factors cancel on the tangential coordinate.
  Point p = make_point("R2", {BigScalar("1"), BigScalar("-0.5")});
  Point q = evaluate(m.X2, p);
  CHECK(abs(q.x[0].big() - BigScalar(1)) < BigScalar(1e-70));
  CHECK(abs(q.x[1].big() + chi_eval(*chi, BigScalar("0.5")).decode()) < BigScalar(1e-70));
}

TEST_CASE("stretch maps survive a JSON round trip") {
  auto chi = default_chi();
  MapExpr psi = build_psi(collar_of(bglue::geometry::disk_model(), "S1"), chi);
  json j = to_json(psi);
  MapExpr back = bglue::geometry::map_from_json(j);
  CHECK(to_json(back) == j);
  Point p = collar_pt("0.3", "0.4");
  CHECK(bglue::geometry::point_distance(evaluate(back, p), evaluate(psi, p)) == BigScalar(0));
}
