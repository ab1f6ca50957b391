#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>

#include "bglue/errors.hpp"
#include "bglue/geometry/closed_forms.hpp"
#include "bglue/verify/verify.hpp"

using namespace bglue::verify;
using bglue::geometry::make_point;
using bglue::geometry::scalar_graph;
using bglue::heisenberg::Letter;
using bglue::numeric::TolerancePolicy;

namespace {

const BigScalar kLnLn2("-0.36651292058166432701");

}  // namespace

TEST_CASE("parallel_for covers every index once and honours BGLUE_THREADS") {
  for (const char* n : {"1", "3"}) {
    setenv("BGLUE_THREADS", n, 1);
    CHECK(worker_count() == std::atoi(n));
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), [&](size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
  setenv("BGLUE_THREADS", "3", 1);
  CHECK_THROWS_AS(parallel_for(10, [](size_t i) { if (i == 7) throw bglue::DomainError("boom"); }),
                  bglue::DomainError);
  // Workers run at the caller's precision.
  {
    bglue::numeric::PrecisionScope scope(128);
    std::vector<int> bits(4);
    parallel_for(4, [&](size_t i) { bits[i] = bglue::numeric::working_precision(); });
    for (int b : bits) CHECK(b == 128);
  }
  setenv("BGLUE_THREADS", "zero", 1);
  CHECK_THROWS_AS(worker_count(), bglue::ParameterError);
  unsetenv("BGLUE_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("the identity passes every order, exactly in the transverse direction") {
  bglue::glue::GluedManifold n = bglue::glue::glue_pair(bglue::geometry::disk_model(), "S1",
                                                        bglue::geometry::disk_model(), "S1",
                                                        bglue::geometry::identity_map(1));
  bglue::glue::GluedMap id({bglue::geometry::identity_map(0), bglue::geometry::identity_map(0)}, n);
  SmoothnessReport r = verify_cr_at_seam(id, 0, BigScalar("0.4"), 3);
  REQUIRE(r.orders.size() == 3);
  for (const auto& o : r.orders) {
    CHECK(o.verdict == Verdict::pass);
    // Oblique stencils round t0 + tau cos(phi) differently on the two sides.
    CHECK(o.mismatch < BigScalar::pow2(-200));
    REQUIRE(o.directions.size() == 9);
    CHECK(o.directions.back().label == "transverse");
    CHECK(o.directions.back().mismatch == BigScalar(0));
  }
  CHECK(r.passes_through(3));
  CHECK(r.to_json()["orders"][0]["verdict"] == "pass");
}

TEST_CASE("unsmoothed disk-annulus X is C1 but not C2 at the seam") {
  Scene raw = disk_annulus_scene(nullptr);
  SmoothnessReport r = verify_cr_at_seam(raw.generator(Letter::X), 0, BigScalar("0.4"), 2);
  CHECK(r.order(1).verdict == Verdict::pass);
  CHECK(r.order(1).mismatch < BigScalar(1e-8));
  CHECK(r.order(2).verdict == Verdict::fail);
  CHECK(r.order(2).mismatch > BigScalar(1e-2));
  // The jump in the transverse second derivative is 4 cos t.
  CHECK(abs(r.order(2).mismatch - BigScalar(4) * cos(BigScalar("0.4"))) < BigScalar(1e-6));
}

TEST_CASE("Psi-conjugation makes the glued generators pass orders 1 to 3") {
  Scene sm = disk_annulus_scene(default_profile());
  for (Letter l : {Letter::X, Letter::Y}) {
    SmoothnessReport r = verify_cr_at_seam(sm.generator(l), 0, BigScalar("0.4"), 3);
    CHECK(r.passes_through(3));
    for (const auto& o : r.orders) CHECK(o.mismatch < BigScalar(1e-6));
  }
}

TEST_CASE("single-chart control passes orders 1 to 4") {
  for (const auto& [f, p] :
       {std::make_pair(scalar_graph("germ_shear", {}), make_point("R2", {BigScalar("0.3"), BigScalar("0.2")})),
        std::make_pair(bglue::geometry::chart_conjugate(
                           "ortho+x", scalar_graph("sphere_projective", {BigScalar(1), BigScalar(2), BigScalar(0)})),
                       make_point("ortho+x", {BigScalar("0.3"), BigScalar("0.2")}))}) {
    SmoothnessReport r = verify_cr_single_chart(f, p, 4);
    CHECK(r.passes_through(4));
  }
}

TEST_CASE("a stencil that leaves the collar is a domain error") {
  Scene raw = disk_annulus_scene(nullptr);
  SeamCheckConfig cfg;
  cfg.base_step = BigScalar("0.6");
  CHECK_THROWS_AS(verify_cr_at_seam(raw.generator(Letter::X), 0, BigScalar("0.4"), 2, cfg), bglue::DomainError);
}

TEST_CASE("flatness of the identity germ") {
  DecayReport r = measure_flatness(scalar_graph("germ_linear", {BigScalar(1)}));
  CHECK(r.g_y_zero);
  CHECK(r.g_x_zero);
  for (const auto& v : r.g_y[0]) CHECK(v.is_zero());
}

TEST_CASE("flatness constant of (x, 2y) is ln ln 2") {
  DecayReport r = measure_flatness(scalar_graph("germ_linear", {BigScalar(2)}));
  for (size_t i = 1; i < r.ys.size(); ++i) CHECK(r.ys[i] < r.ys[i - 1]);
  CHECK(std::fabs(r.constant_fit.intercept - kLnLn2.to_double()) < 0.05);
  CHECK(r.constant_fit.n == 16);

  FlatnessConfig at;
  at.y_lo = BigScalar("0.1");
  at.y_hi = BigScalar("0.2");
  at.points = 2;
  DecayReport one = measure_flatness(scalar_graph("germ_linear", {BigScalar(2)}), at);
  BigScalar want = BigScalar(1) / log(exp(BigScalar(10)) - log(BigScalar(2))) - BigScalar("0.1");
  CHECK(abs(one.g_y[0][1] / want - BigScalar(1)) < BigScalar("1e-20"));
  CHECK(abs(one.g_y[0][1] / BigScalar("3.147e-7") - BigScalar(1)) < BigScalar("0.01"));
}

TEST_CASE("the shear germ beats polynomial decay") {
  DecayReport r = measure_flatness(scalar_graph("germ_shear", {}));
  CHECK(r.slope_fit.slope > 8);
}

TEST_CASE("sandwich bounds hold for random germs") {
  std::mt19937_64 rng(11);
  const BigScalar a(2);
  for (int g = 0; g < 4; ++g) {
    MapExpr germ = random_sandwich_germ(a, rng);
    FlatnessConfig cfg;
    cfg.xs = {BigScalar("-1"), BigScalar("0.7")};
    DecayReport r = measure_flatness(germ, cfg);
    for (size_t xi = 0; xi < r.xs.size(); ++xi)
      for (size_t yi = 0; yi < r.ys.size(); ++yi) {
        auto [lo, hi] = sandwich_bounds(a, r.ys[yi]);
        CHECK(lo <= r.g_y[xi][yi]);
        CHECK(r.g_y[xi][yi] <= hi);
      }
  }
}

TEST_CASE("line fit") {
  LineFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2));
  CHECK(f.intercept == doctest::Approx(1));
  CHECK(f.rms == doctest::Approx(0));
}

TEST_CASE("orbit of a fixed point") {
  auto spec = bglue::heisenberg::build_action("sphere");
  Point p = make_point("S2", {BigScalar(1), BigScalar(0), BigScalar(0)});
  OrbitData o = orbit(spec.Y, p, 50, "Y");
  CHECK(o.trajectory.size() == 51);
  OmegaEstimate w = omega_estimate(o, BigScalar(1e-3));
  CHECK(w.residual == BigScalar(0));
  CHECK(w.converged);
  CHECK(bglue::geometry::point_distance(w.point, p) == BigScalar(0));
  std::string csv = o.to_csv();
  CHECK(csv.rfind("step,chart,x0,x1,x2\n0,S2,", 0) == 0);
}

TEST_CASE("orbits that leave the domain are truncated") {
  bglue::geometry::Region r{"R2", 1, BigScalar(0), BigScalar(1)};
  MapExpr up = bglue::geometry::piecewise({{r, bglue::geometry::translation_map({BigScalar(0), BigScalar("0.4")})}});
  OrbitData o = orbit(up, make_point("R2", {BigScalar(0), BigScalar("0.1")}), 10);
  CHECK(o.truncated);
  CHECK(o.trajectory.size() == 4);
  CHECK(o.truncation_reason.find("step 4") == 0);
}

TEST_CASE("Y orbits in the upper half-disk approach (0, 1, 0)") {
  auto spec = bglue::heisenberg::build_action("disk_blowup");
  Point p = spec.model.canonicalize(make_point("S2", {BigScalar("0.6"), BigScalar("0"), BigScalar("0.8")}));
  OmegaEstimate w = omega_estimate(orbit(spec.Y, p, 20000, "Y"), BigScalar(1e-3));
  CHECK(w.converged);
  CHECK(bglue::geometry::point_distance(w.point, make_point("S2", {BigScalar(0), BigScalar(1), BigScalar(0)})) <
        BigScalar(1e-3));
}

TEST_CASE("density on the torus") {
  auto torus = bglue::heisenberg::build_action("torus");
  Point p = make_point(torus.model.fallback_chart, {BigScalar("0.1"), BigScalar("0.2")});
  DensityReport r = word_ball_density(torus, p, BigScalar("0.05"), 200);
  CHECK(r.dense);
  REQUIRE(r.length_when_dense.has_value());
  CHECK(*r.length_when_dense <= 200);
  CHECK(r.cells_per_axis == 29);

  DensityReport sparse = density_check(orbit(torus.X, p, 10), BigScalar("0.05"));
  CHECK_FALSE(sparse.dense);
  CHECK(sparse.uncovered > 0);
  CHECK(sparse.uncovered_sample.size() == 20);

  auto plane = bglue::heisenberg::build_action("plane");
  CHECK_THROWS_AS(density_check(orbit(plane.X, make_point("R2", {BigScalar(0), BigScalar(0)}), 3), BigScalar("0.05")),
                  bglue::DomainError);
}

TEST_CASE("homomorphism on the smoothed scene") {
  Scene sm = disk_annulus_scene(default_profile());
  HomomorphismReport h = check_homomorphism(sm, 4, 8, 10, 2);
  CHECK(h.max_defect < BigScalar(1e-20));
  CHECK(h.words == 4);
  CHECK(sm.to_json()["actions"].size() == 2);
}
