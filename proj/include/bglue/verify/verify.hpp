#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bglue/glue/glue.hpp"
#include "bglue/heisenberg/heisenberg.hpp"
#include "bglue/numeric/tolerance.hpp"

namespace bglue::verify {

using geometry::Coord;
using geometry::json;
using geometry::MapExpr;
using geometry::Point;
using numeric::BigScalar;

json coord_to_json(const Coord& c);
json point_to_json(const Point& p);

// ---- seam smoothness -------------------------------------------------------------

struct SeamCheckConfig {
  int max_order = 3;
  /// Oblique directions pi (j + 1/2) / n in the (t, s) plane, plus the pure transverse one.
  int directions = 8;
  BigScalar base_step = BigScalar("0.01");
  int richardson_levels = 6;
  numeric::TolerancePolicy tol;

  json to_json() const;
};

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct DirectionResult {
  std::string label;  ///< "phi=0.19635" or "transverse"
  std::vector<BigScalar> plus, minus;  ///< one-sided k-th derivatives per output component
  BigScalar mismatch;
  BigScalar err_plus, err_minus;
};

struct OrderResult {
  int order = 0;
  BigScalar mismatch;             ///< max over directions and components
  BigScalar err_plus, err_minus;  ///< max Richardson error per side
  BigScalar scale;                ///< max |derivative|, for the relative tolerance
  std::string worst_direction;
  Verdict verdict = Verdict::inconclusive;
  std::vector<DirectionResult> directions;
};

struct SmoothnessReport {
  std::string location;  ///< chart + point
  std::vector<OrderResult> orders;
  json config;

  const OrderResult& order(int k) const;
  bool passes_through(int k) const;
  json to_json() const;
};

/// F in two-sided coordinates (t, s): s > 0 and s < 0 are the two sides,
/// s = 0 the seam.
using TwoSidedFn = std::function<std::vector<BigScalar>(const BigScalar& t, const BigScalar& s)>;

/// One-sided k-th directional derivatives from s >= 0 and s <= 0 for k <= r.
/// `s_limit` bounds |s| reached by any stencil (DomainError otherwise).
SmoothnessReport check_two_sided(const std::string& location, const TwoSidedFn& f, const BigScalar& t0, int r,
                                 const BigScalar& s_limit, const SeamCheckConfig& cfg);

/// C^r check of a glued map at seam point (t0, 0) of `seam`.
SmoothnessReport verify_cr_at_seam(const glue::GluedMap& F, size_t seam, const BigScalar& t0, int r,
                                   const SeamCheckConfig& cfg = {});

/// Control: the same two-sided comparison for a map of one chart at p
/// (transverse = coordinate 1, tangential = coordinate 0).
SmoothnessReport verify_cr_single_chart(const MapExpr& f, const Point& p, int r, const SeamCheckConfig& cfg = {});

// ---- flatness --------------------------------------------------------------------

struct FlatnessConfig {
  BigScalar y_lo = BigScalar("0.02");
  BigScalar y_hi = BigScalar("0.05");
  int points = 16;
  std::vector<BigScalar> xs{BigScalar("0.3")};
  int phi_power = 2;

  json to_json() const;
};

struct LineFit {
  double slope = 0, intercept = 0, rms = 0;
  int n = 0;
};
/// Least squares y = slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct DecayReport {
  std::vector<BigScalar> ys;                 ///< strictly decreasing
  std::vector<BigScalar> xs;
  std::vector<std::vector<BigScalar>> g_y;   ///< [x index][y index]
  std::vector<std::vector<BigScalar>> g_x;
  bool g_y_zero = false, g_x_zero = false;   ///< identically zero on the grid
  LineFit slope_fit;       ///< log|G_y| vs log y, all x pooled
  LineFit constant_fit;    ///< log|G_y| + 1/y - 2 log y vs constant (slope 0)
  LineFit tangential_fit;  ///< log|G_x| vs log y, when G_x is not identically zero
  std::vector<std::string> warnings;

  json to_json() const;
};

/// G = Phi^-k g Phi^k - gbar x Id with gbar(x) = g_x(x, 0), on a log-spaced y grid.
DecayReport measure_flatness(const MapExpr& germ, const FlatnessConfig& cfg = {});

/// Closed-form bounds on G_y for germs with (a/2) y <= g_y <= 2 a y.
std::pair<BigScalar, BigScalar> sandwich_bounds(const BigScalar& a, const BigScalar& y);

/// The germ_random family with g_y / y in [a/2, 2a] everywhere.
MapExpr random_sandwich_germ(const BigScalar& a, std::mt19937_64& rng);

// ---- orbits ---------------------------------------------------------------------

struct OrbitData {
  Point base;
  std::string generator;
  int iterates = 0;
  std::vector<Point> trajectory;  ///< iterates + 1 points unless truncated
  bool truncated = false;
  std::string truncation_reason;

  std::string to_csv() const;
  json to_json() const;
};

OrbitData orbit(const MapExpr& f, const Point& p, int n, const std::string& label = "f");

struct OmegaEstimate {
  Point point;          ///< coordinate mean of the last 10% of the orbit
  BigScalar residual;   ///< diameter of that tail
  bool converged = false;
  json to_json() const;
};

/// Converged when the residual is below 10 * tol.
OmegaEstimate omega_estimate(const OrbitData& o, const BigScalar& tol);

struct DensityReport {
  BigScalar eps;
  int cells_per_axis = 0;
  size_t cells = 0, uncovered = 0;
  bool dense = false;
  size_t points = 0;
  std::optional<int> length_when_dense;  ///< word length at which every cell was hit
  std::vector<std::pair<int, int>> uncovered_sample;  ///< up to 20 missed cells

  json to_json() const;
};

/// Cell coverage of the unit-scaled fundamental domain of a doubly periodic
/// chart. Cells have side eps / sqrt 2, so coverage means every point is
/// within eps of the orbit.
DensityReport density_check(const OrbitData& o, const BigScalar& eps);

/// Orbit of p under all words of length <= max_len, grown by BFS length and
/// stopped as soon as the orbit is eps-dense.
DensityReport word_ball_density(const heisenberg::ActionSpec& spec, const Point& p, const BigScalar& eps, int max_len);

// ---- scenes ---------------------------------------------------------------------

/// Glued manifold with one H-action per piece.
struct Scene {
  std::string name;
  glue::GluedManifold host;
  std::vector<heisenberg::ActionSpec> actions;  ///< one per piece
  stretch::ProfilePtr profile;                  ///< null when unsmoothed
  std::vector<MapExpr> psi;                     ///< per piece, when smoothed

  bool smoothed() const { return profile != nullptr; }
  /// Glued image of an element (closed form per piece, conjugated when smoothed).
  glue::GluedMap element(const heisenberg::HeisElem& g) const;
  glue::GluedMap generator(heisenberg::Letter l) const;
  /// Generators applied one letter at a time, rightmost first.
  glue::GluedPoint apply_word(const heisenberg::Word& w, const glue::GluedPoint& p) const;
  json to_json() const;
};

/// Checks that the generators glue across every seam (IncompatibleMaps
/// otherwise) and builds Psi per piece when `profile` is set.
Scene make_scene(std::string name, glue::GluedManifold host, std::vector<heisenberg::ActionSpec> actions,
                 stretch::ProfilePtr profile);

/// S^2 blown up at (1,0,0) glued along e+ to S^2 blown up at (+-1,0,0), alpha = id.
Scene disk_annulus_scene(stretch::ProfilePtr profile);
/// Single-piece scene (no seams): the blown-up disk, torus, sphere, ...
Scene single_piece_scene(const heisenberg::ActionSpec& spec);

/// Default chi for the scenes: y0 = 0.2, y1 = 0.8.
stretch::ProfilePtr default_profile();

// ---- homomorphism check ------------------------------------------------------------

struct HomomorphismReport {
  int words = 0, points = 0;
  BigScalar max_defect;
  std::string worst_word;
  json to_json() const;
};

/// For random words w: element(eval(w)) vs letter-by-letter application, on
/// uniform and near-seam sample points.
HomomorphismReport check_homomorphism(const Scene& scene, int n_words, size_t max_len, int n_points,
                                      std::uint64_t seed);

// ---- parallel map --------------------------------------------------------------------

/// Worker count from BGLUE_THREADS (default: hardware concurrency, at least 1).
int worker_count();
/// fn(i) for i in [0, n) on worker_count() threads at the caller's precision.
/// Results must be written to per-index slots; the first exception is rethrown.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace bglue::verify
