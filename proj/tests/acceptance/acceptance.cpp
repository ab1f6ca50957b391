// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <sys/resource.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "bglue/blowup/blowup.hpp"
#include "bglue/geometry/chart.hpp"
#include "bglue/verify/verify.hpp"

using namespace bglue;
using geometry::make_point;
using geometry::MapExpr;
using geometry::Point;
using heisenberg::HeisElem;
using heisenberg::Letter;
using numeric::BigScalar;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string e(const BigScalar& v) { return v.to_string(3); }

std::string fmt(double v, const char* f = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- 1: C^1 but not C^2 before smoothing, orders 1..3 after ------------------------

Outcome seam_smoothness() {
  const std::vector<BigScalar> ts{BigScalar("0.4"), BigScalar("2.5")};
  verify::Scene raw = verify::disk_annulus_scene(nullptr);
  verify::Scene sm = verify::disk_annulus_scene(verify::default_profile());
  BigScalar raw1(0), raw2(0), smooth(0);
  bool ok = true;
  for (const auto& t : ts) {
    for (Letter l : {Letter::X, Letter::Y}) {
      auto r = verify::verify_cr_at_seam(raw.generator(l), 0, t, 2);
      raw1 = max(raw1, r.order(1).mismatch);
      ok = ok && r.order(1).verdict == verify::Verdict::pass;
      // The action fails C^2 as soon as one generator does.
      raw2 = max(raw2, r.order(2).mismatch);
      auto s = verify::verify_cr_at_seam(sm.generator(l), 0, t, 3);
      ok = ok && s.passes_through(3);
      for (const auto& o : s.orders) smooth = max(smooth, o.mismatch);
    }
  }
  ok = ok && raw1 < BigScalar(1e-8) && raw2 > BigScalar(1e-2) && smooth < BigScalar(1e-6);
  return {ok, "raw order-1 mismatch " + e(raw1) + ", raw order-2 mismatch " + e(raw2) +
                  ", smoothed orders 1-3 mismatch " + e(smooth)};
}

// ---- 2: flatness asymptotic of (x, 2y) ------------------------------------------------

Outcome flatness_constant() {
  const double lnln2 = std::log(std::log(2.0));
  verify::DecayReport r = verify::measure_flatness(geometry::scalar_graph("germ_linear", {BigScalar(2)}));
  verify::FlatnessConfig at;
  at.y_lo = BigScalar("0.1");
  at.y_hi = BigScalar("0.2");
  at.points = 2;
  verify::DecayReport one = verify::measure_flatness(geometry::scalar_graph("germ_linear", {BigScalar(2)}), at);
  // Grid runs from y_hi down to y_lo, so y = 0.1 is the last entry.
  BigScalar g = one.g_y[0].back();
  BigScalar rel = abs(g / BigScalar("3.147e-7") - BigScalar(1));
  bool ok = std::fabs(r.constant_fit.intercept - lnln2) < 0.05 && rel < BigScalar("0.01");
  return {ok, "constant " + fmt(r.constant_fit.intercept, "%.6f") + " vs ln ln 2 = " + fmt(lnln2, "%.6f") +
                  ", G_y(0.1) = " + e(g) + " (rel. diff " + e(rel) + ")"};
}

// ---- 3: sandwich bounds ------------------------------------------------------------------

Outcome sandwich() {
  std::mt19937_64 rng(2024);
  const BigScalar a(2);
  int points = 0, violations = 0;
  for (int k = 0; k < 20; ++k) {
    MapExpr germ = verify::random_sandwich_germ(a, rng);
    verify::FlatnessConfig cfg;
    cfg.xs = {BigScalar("-0.8"), BigScalar("0.3"), BigScalar("1.1")};
    verify::DecayReport r = verify::measure_flatness(germ, cfg);
    for (size_t xi = 0; xi < r.xs.size(); ++xi)
      for (size_t yi = 0; yi < r.ys.size(); ++yi) {
        auto [lo, hi] = verify::sandwich_bounds(a, r.ys[yi]);
        ++points;
        if (!(lo <= r.g_y[xi][yi] && r.g_y[xi][yi] <= hi)) ++violations;
      }
  }
  return {violations == 0 && points == 20 * 3 * 16,
          "20 germs, " + std::to_string(points) + " grid points, " + std::to_string(violations) + " outside the bounds"};
}

// ---- 4: homomorphism on the smoothed scene ------------------------------------------------

Outcome homomorphism() {
  verify::Scene sm = verify::disk_annulus_scene(verify::default_profile());
  verify::HomomorphismReport r = verify::check_homomorphism(sm, 50, 8, 100, 17);
  bool ok = r.words == 50 && r.points == 100 && r.max_defect < BigScalar(1e-20);
  return {ok, std::to_string(r.words) + " words x " + std::to_string(r.points) + " points, max defect " +
                  e(r.max_defect) + " (worst word " + r.worst_word + ")"};
}

// ---- 5: distortion of Z -------------------------------------------------------------------

Outcome distortion() {
  const auto start = std::chrono::steady_clock::now();
  heisenberg::DistortionProfile p = heisenberg::distortion_profile(64, 14);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  const double peak_gb = static_cast<double>(ru.ru_maxrss) / (1024.0 * 1024.0);
  bool ok = p.rows[0].exact && p.rows[0].length == 4 && p.square_bound_holds && p.min_ratio_nonincreasing &&
            p.min_ratio_upto(144) <= 1.0 / 3.0 && secs < 60 && peak_gb < 2;
  return {ok, "|Z| = " + std::to_string(p.rows[0].length) + ", |Z^{n^2}| <= 4n for n <= 64: " +
                  (p.square_bound_holds ? "yes" : "no") + ", min ratio by m = 144: " + fmt(p.min_ratio_upto(144)) +
                  ", radius-14 ball " + std::to_string(p.ball_size) + " elements in " + fmt(secs, "%.2f") +
                  " s, peak RSS " + fmt(peak_gb, "%.3f") + " GB"};
}

// ---- 6: blow-up functoriality ----------------------------------------------------------------

Outcome functoriality() {
  heisenberg::ActionSpec s = heisenberg::build_action("sphere");
  BigScalar worst(0);
  int checks = 0;
  bool counts = true;
  for (int sign : {1, -1}) {
    for (Letter f : {Letter::X, Letter::Xinv, Letter::Y, Letter::Yinv})
      for (Letter g : {Letter::X, Letter::Xinv, Letter::Y, Letter::Yinv}) {
        auto r = blowup::functoriality_check(s.generator(f), s.generator(g), {blowup::sphere_site(sign)}, 180, 20,
                                             static_cast<std::uint64_t>(31 * checks + 5));
        counts = counts && r.interior_samples + r.boundary_samples == 200 && r.boundary_samples == 20;
        worst = max(worst, r.max_defect());
        ++checks;
      }
  }
  return {counts && worst < BigScalar(1e-25),
          std::to_string(checks) + " generator pairs at (+-1, 0, 0), 200 samples each (20 on the circle), max defect " +
              e(worst)};
}

// ---- 7: Y-dynamics on the blown-up disk -----------------------------------------------------

Outcome disk_dynamics() {
  heisenberg::ActionSpec d = heisenberg::build_action("disk_blowup");
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  const Point right = make_point("S2", {BigScalar(0), BigScalar(1), BigScalar(0)});
  const Point left = make_point("S2", {BigScalar(0), BigScalar(-1), BigScalar(0)});
  BigScalar worst_omega(0);
  int hit = 0;
  for (int half : {1, -1}) {
    for (int k = 0; k < 10; ++k) {
      // Uniform on the open hemisphere sign(z) = half.
      double x, y, z, n;
      do {
        x = u(rng), y = u(rng), z = u(rng);
        n = std::sqrt(x * x + y * y + z * z);
      } while (n < 0.1 || n > 1 || std::fabs(z) / n < 1e-3);
      z = half * std::fabs(z);
      Point p = d.model.canonicalize(make_point("S2", {BigScalar(x / n), BigScalar(y / n), BigScalar(z / n)}));
      verify::OmegaEstimate w = verify::omega_estimate(verify::orbit(d.Y, p, 20000, "Y"), BigScalar(1e-3));
      BigScalar dist = geometry::point_distance(w.point, half > 0 ? right : left);
      worst_omega = max(worst_omega, dist);
      if (dist < BigScalar(1e-3)) ++hit;
    }
  }
  // Invariance of the boundary circle and of the equator z = 0 under all four generators.
  BigScalar circle(0), equator(0);
  const BigScalar pi = BigScalar::pi();
  for (Letter l : {Letter::X, Letter::Xinv, Letter::Y, Letter::Yinv}) {
    MapExpr g = d.generator(l);
    for (int i = 0; i < 64; ++i) {
      BigScalar t = -pi + BigScalar(2) * pi * (BigScalar(i) + BigScalar("0.5")) / BigScalar(64);
      Point q = geometry::evaluate(g, make_point("polar+x", {t, BigScalar(0)}));
      if (q.chart != "polar+x") {
        circle = BigScalar(1);
      } else {
        circle = max(circle, abs(q.x[1].big()));
      }
      BigScalar th = BigScalar("0.05") + (BigScalar(2) * pi - BigScalar("0.1")) * BigScalar(i) / BigScalar(63);
      Point e0 = d.model.canonicalize(make_point("S2", {cos(th), sin(th), BigScalar(0)}));
      geometry::Vec amb = geometry::ambient_of(geometry::evaluate(g, e0));
      equator = max(equator, abs(amb[2]));
    }
  }
  bool ok = hit == 20 && circle < BigScalar(1e-20) && equator < BigScalar(1e-20);
  return {ok, std::to_string(hit) + "/20 seeds within 1e-3 of their attractor (worst " + e(worst_omega) +
                  "), boundary drift " + e(circle) + ", equator drift " + e(equator)};
}

// ---- 8: minimal torus action ------------------------------------------------------------------

Outcome torus_density() {
  heisenberg::ActionSpec t = heisenberg::build_action("torus", sqrt(BigScalar(2)) - BigScalar(1));
  std::mt19937_64 rng(8);
  int dense = 0, longest = 0;
  for (int k = 0; k < 5; ++k) {
    verify::DensityReport r = verify::word_ball_density(t, t.model.sample_interior(rng), BigScalar("0.05"), 200);
    if (r.dense && r.length_when_dense && *r.length_when_dense <= 200) {
      ++dense;
      longest = std::max(longest, *r.length_when_dense);
    }
  }
  return {dense == 5, std::to_string(dense) + "/5 base points 0.05-dense, longest word length needed " +
                          std::to_string(longest)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;  ///< wall-clock limit, 0 when the criterion has its own
  };
  const std::vector<Criterion> all{
      {"seam smoothness (C1 not C2 raw, C3 smoothed)", seam_smoothness, 120},
      {"flatness constant and G_y(0.1)", flatness_constant, 0},
      {"sandwich bounds on random germs", sandwich, 0},
      {"homomorphism on the smoothed scene", homomorphism, 0},
      {"distortion of the centre", distortion, 0},
      {"blow-up functoriality", functoriality, 0},
      {"disk dynamics and invariant curves", disk_dynamics, 0},
      {"torus density", torus_density, 0},
  };
  int failed = 0;
  for (size_t i = 0; i < all.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& ex) {
      o = {false, std::string("threw: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (all[i].budget_s > 0 && secs >= all[i].budget_s) {
      o.pass = false;
      o.detail += "; over the " + fmt(all[i].budget_s, "%.0f") + " s budget";
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << "  " << all[i].name << ": " << o.detail << " ["
              << fmt(secs, "%.2f") << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
