#include <doctest.h>

#include <random>

#include "bglue/errors.hpp"
#include "bglue/geometry/closed_forms.hpp"
#include "bglue/geometry/linearize.hpp"
#include "bglue/geometry/manifold.hpp"
#include "bglue/geometry/map_expr.hpp"
#include "bglue/numeric/tolerance.hpp"

using namespace bglue::geometry;
using bglue::numeric::BigScalar;
using bglue::numeric::LogScalar;

namespace {

BigScalar max_abs_diff(const Point& a, const Point& b) {
  BigScalar m;
  for (size_t i = 0; i < a.dim(); ++i) m = max(m, abs(a.x[i].big() - b.x[i].big()));
  return m;
}

MapExpr heis_sphere(double a, double b, double c) {
  return scalar_graph("sphere_projective", {BigScalar(a), BigScalar(b), BigScalar(c)});
}

const BigScalar kAlpha = sqrt(BigScalar(2)) - BigScalar(1);

}  // namespace

TEST_CASE("every chart round-trips on 1000 samples") {
  bglue::numeric::TolerancePolicy tol;
  torus_chart(kAlpha);
  cylinder_chart(kAlpha);
  calegari_chart(kAlpha);
  for (const auto& id : ChartRegistry::instance().ids()) {
    CAPTURE(id);
    BigScalar err = chart_roundtrip_error(chart(id), 1000, 11);
    CHECK(err < tol.roundtrip_rel());
  }
}

TEST_CASE("transitions between sphere charts") {
  Point p("ortho+x", {0.3, 0.2});
  Point q = to_chart(p, "S2");
  CHECK(q.dim() == 3);
  Point polar = to_chart(q, "polar+x");
  Point back = to_chart(polar, "ortho+x");
  CHECK(max_abs_diff(back, p) < BigScalar(1e-70));
  CHECK_FALSE(try_to_chart(q, "ortho-x").has_value());
  CHECK_THROWS_AS(to_chart(q, "ortho-x"), bglue::DomainError);
}

TEST_CASE("evaluate: identity, Heisenberg X, composed translations") {
  Point p("R2", {0.3, 0.7});
  CHECK(max_abs_diff(evaluate(identity_map(2), p), p) == BigScalar(0));

  MapExpr x = linear_map(heisenberg_matrix(BigScalar(1), BigScalar(0), BigScalar(0)), "R3");
  Point img = evaluate(x, Point("R3", {0, 1, 0}));
  CHECK(max_abs_diff(img, Point("R3", {1, 1, 0})) == BigScalar(0));

  MapExpr f = translation_map({BigScalar(1), BigScalar(0)});
  MapExpr g = translation_map({BigScalar(0), BigScalar(1)});
  Point r = evaluate(compose(f, g), Point("R2", {0, 0}));
  CHECK(max_abs_diff(r, Point("R2", {1, 1})) == BigScalar(0));
}

TEST_CASE("structural inverses") {
  MapExpr t = translation_map({BigScalar(2), BigScalar(-3)});
  Point p("R2", {0.5, 0.25});
  CHECK(max_abs_diff(evaluate(invert(t), p), Point("R2", {-1.5, 3.25})) == BigScalar(0));

  MapExpr x = linear_map(heisenberg_matrix(BigScalar(1), BigScalar(0), BigScalar(0)));
  json inv = to_json(invert(x));
  CHECK(scalar_from_json(inv["matrix"][0][1]) == BigScalar(-1));

  CHECK_THROWS_AS(invert(scalar_graph("germ_shear", {})), bglue::UnsupportedError);
}

TEST_CASE("f o f^-1 is the identity on samples for every invertible closed form") {
  bglue::numeric::TolerancePolicy tol;
  std::mt19937_64 rng(3);
  std::vector<MapExpr> maps = {heis_sphere(1, 0, 0),
                               heis_sphere(-2, 3, 1),
                               scalar_graph("heis_plane", {BigScalar(1), BigScalar(2), BigScalar(-1)}),
                               scalar_graph("heis_torus", {kAlpha, BigScalar(1), BigScalar(1), BigScalar(0)}),
                               scalar_graph("heis_cylinder", {kAlpha, BigScalar(2), BigScalar(0), BigScalar(1)}),
                               scalar_graph("disk_rotation", {BigScalar(0.7)}),
                               scalar_graph("disk_moebius", {BigScalar(0.4)}),
                               scalar_graph("germ_linear", {BigScalar(2)})};
  for (const auto& f : maps) {
    MapExpr id = compose(f, invert(f));
    const std::string name = to_json(f)["name"];
    const Chart& ch = chart(closed_form(name).chart(vec_from_json(to_json(f)["params"])));
    for (int i = 0; i < 50; ++i) {
      Point p = make_point(ch.id, ch.sample(rng));
      Point q = evaluate(id, p);
      CAPTURE(name);
      CHECK(point_distance(p, q) < tol.path_defect());
    }
  }
}

TEST_CASE("composition is structural") {
  MapExpr f = heis_sphere(1, 0, 0), g = heis_sphere(0, 1, 0);
  Point p = make_point("S2", {BigScalar(0.6), BigScalar(0), BigScalar(0.8)});
  Point a = evaluate(compose(f, g), p);
  Point b = evaluate(f, evaluate(g, p));
  CHECK(max_abs_diff(a, b) == BigScalar(0));
}

TEST_CASE("jacobian_fd examples") {
  Matrix m{{BigScalar(2), BigScalar(1)}, {BigScalar(-1), BigScalar(3)}};
  Matrix j = jacobian_fd(linear_map(m), Point("R2", {0.4, -0.2}));
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) CHECK(abs(j[r][c] - m[r][c]) < BigScalar(1e-40));

  ClosedForm sq;
  sq.name = "test_square_shear";
  sq.dim = 2;
  sq.chart = [](const Vec&) { return std::string("R2"); };
  sq.eval = [](const Vec&, const Vec& x) { return Vec{x[0] + x[1] * x[1], x[1]}; };
  register_closed_form(sq);
  Matrix k = jacobian_fd(scalar_graph("test_square_shear", {}), Point("R2", {0, 1}));
  CHECK(abs(k[0][0] - BigScalar(1)) < BigScalar(1e-40));
  CHECK(abs(k[0][1] - BigScalar(2)) < BigScalar(1e-40));
  CHECK(abs(k[1][0]) < BigScalar(1e-40));
  CHECK(abs(k[1][1] - BigScalar(1)) < BigScalar(1e-40));
}

TEST_CASE("projectivized X in the orthogonal chart about (1,0,0): symbolic oracle") {
  MapExpr x = chart_conjugate("ortho+x", heis_sphere(1, 0, 0));
  Matrix j0 = jacobian_fd(x, Point("ortho+x", {0, 0}));
  CHECK(abs(j0[0][0] - BigScalar(1)) < BigScalar(1e-40));
  CHECK(abs(j0[0][1]) < BigScalar(1e-40));
  CHECK(abs(j0[1][0]) < BigScalar(1e-40));
  CHECK(abs(j0[1][1] - BigScalar(1)) < BigScalar(1e-40));

  Matrix j = jacobian_fd(x, make_point("ortho+x", {BigScalar("0.3"), BigScalar("0.2")}));
  const char* want[2][2] = {{"0.617700499402187355457120420998", "0.00910810497559346879600490410863"},
                            {"-0.107255158976038240848638352924", "0.784655307849973695927414553123"}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) CHECK(abs(j[r][c] - BigScalar(want[r][c])) < BigScalar(1e-28));
}

TEST_CASE("closed-form Jacobian of the sphere action agrees with finite differences") {
  MapExpr f = heis_sphere(1, 2, -1);
  Point p = make_point("S2", {BigScalar(0.48), BigScalar(0.6), BigScalar(0.64)});
  auto jc = jacobian(f, p);
  REQUIRE(jc.has_value());
  // Directional derivative along a tangent vector v: J v.
  Vec v{BigScalar(0.6), BigScalar(-0.48), BigScalar(0)};
  Vec jv = matvec(*jc, v);
  Vec x0 = p.values();
  auto fn = [&](const BigScalar& t) {
    Vec q = x0;
    for (int i = 0; i < 3; ++i) q[i] += t * v[i];
    return evaluate(f, make_point("S2", q)).values();
  };
  bglue::numeric::FDConfig cfg;
  auto fd = bglue::numeric::fd_derivative_vec(fn, BigScalar(0), cfg);
  for (int i = 0; i < 3; ++i) CHECK(abs(fd[i].estimate - jv[i]) < BigScalar(1e-40));
}

TEST_CASE("piecewise dispatch and domain errors name the node") {
  Region r{"R2", 1, BigScalar(0), BigScalar(1)};
  MapExpr pw = piecewise({{r, translation_map({BigScalar(1), BigScalar(0)})}});
  CHECK(max_abs_diff(evaluate(pw, Point("R2", {0, 0.5})), Point("R2", {1, 0.5})) == BigScalar(0));
  try {
    evaluate(pw, Point("R2", {0, 2}));
    FAIL("expected a domain error");
  } catch (const bglue::DomainError& e) {
    CHECK(std::string(e.what()).find("piecewise") != std::string::npos);
  }
  MapExpr with_default = piecewise({{r, translation_map({BigScalar(1), BigScalar(0)})}}, identity_map(0));
  CHECK(max_abs_diff(evaluate(with_default, Point("R2", {0, 2})), Point("R2", {0, 2})) == BigScalar(0));
}

TEST_CASE("sub-range coordinates pass through leaf maps by linearization") {
  // (x, y) -> (x + y, 3y) with y = e^{-10^6}: tangential part unchanged, transverse tripled in log form.
  Matrix m{{BigScalar(1), BigScalar(1)}, {BigScalar(0), BigScalar(3)}};
  Point p("R2", std::vector<Coord>{Coord(BigScalar(0.25)), Coord(LogScalar(1, BigScalar(-1000000)))});
  Point q = evaluate(linear_map(m), p);
  CHECK(q.x[0].big() == BigScalar(0.25));
  REQUIRE(q.x[1].is_log());
  CHECK(abs(q.x[1].log().logmag() - (BigScalar(-1000000) + log(BigScalar(3)))) < BigScalar(1e-60));
}

TEST_CASE("JSON round trip of map expressions") {
  MapExpr f = compose(heis_sphere(1, 0, 0), chart_conjugate("S2", invert(heis_sphere(0, 1, 0))));
  Region r{"R2", 1, BigScalar(0), BigScalar(1)};
  MapExpr g = piecewise({{r, product(translation_map({BigScalar(0.5)}), linear_map({{BigScalar(2)}}))}},
                        identity_map(0));
  for (const auto& m : {f, g}) {
    json j = to_json(m);
    MapExpr back = map_from_json(j);
    CHECK(to_json(back) == j);
  }
  CHECK_THROWS_AS(map_from_json(json{{"kind", "nonsense"}}), bglue::ParameterError);
}

TEST_CASE("manifold models") {
  ManifoldModel d = heis_disk_model();
  Point b = d.component("e+").at(BigScalar(1));
  CHECK(d.component("e+").contains(b));
  Point far = d.canonicalize(make_point("S2", {BigScalar(-1), BigScalar(0), BigScalar(0)}));
  CHECK(far.chart == "S2");
  Point near = d.canonicalize(make_point("S2", {BigScalar(0.99), BigScalar(0.1), BigScalar(0)}));
  CHECK(near.chart == "polar+x");
  CHECK(model_from_json(to_json(torus_model(kAlpha))).fallback_chart == torus_model(kAlpha).fallback_chart);
  CHECK(closed_surface_name(2 * disk_model().euler_characteristic) == "sphere");
  CHECK(closed_surface_name(2 * annulus_model().euler_characteristic) == "torus");
}
