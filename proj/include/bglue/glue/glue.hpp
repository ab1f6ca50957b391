#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bglue/errors.hpp"
#include "bglue/geometry/manifold.hpp"
#include "bglue/stretch/stretch.hpp"

namespace bglue::glue {

using geometry::json;
using geometry::MapExpr;
using geometry::ManifoldModel;
using geometry::Point;
using geometry::Vec;
using numeric::BigScalar;

/// One identified pair of boundary components. `alpha` acts on the
/// tangential coordinate ("R1" points) and carries component a onto b.
struct Seam {
  size_t piece_a = 0;
  std::string comp_a;
  size_t piece_b = 1;
  std::string comp_b;
  MapExpr alpha;
};

/// A point of the glued manifold: a piece index and a point of that piece.
struct GluedPoint {
  size_t piece = 0;
  Point point;

  std::string to_string(int digits = 12) const;
};

/// N = (M_1 u ... u M_k) / ~ along the listed seams. Pieces may repeat
/// (self-gluing) and seams may chain.
class GluedManifold {
 public:
  GluedManifold(std::vector<ManifoldModel> pieces, std::vector<Seam> seams);

  const std::vector<ManifoldModel>& pieces() const { return pieces_; }
  const std::vector<Seam>& seams() const { return seams_; }
  const ManifoldModel& piece(size_t i) const;

  /// Sum of the pieces' Euler characteristics (gluing along circles adds nothing).
  int euler_characteristic() const;
  /// Boundary components not used by any seam.
  std::vector<std::pair<size_t, std::string>> free_boundary() const;
  bool closed() const { return free_boundary().empty(); }
  /// "sphere", "torus", ... for closed results.
  std::string topology() const;

  /// Seam whose a- or b-side is (piece, component), if any.
  std::optional<size_t> seam_of(size_t piece, const std::string& comp) const;

  /// Canonical representative: seam points move to the b-side; otherwise the
  /// piece's preferred chart.
  GluedPoint canonicalize(const GluedPoint& p) const;

  /// Seam-chart coordinates (t, s) of p: s > 0 on the a-side, s < 0 on the
  /// b-side. nullopt when p is outside both collars of the seam.
  std::optional<std::vector<geometry::Coord>> to_seam(size_t seam, const GluedPoint& p) const;
  /// Inverse of to_seam. |s| < seam_eps lands on the b-side.
  GluedPoint from_seam(size_t seam, const std::vector<geometry::Coord>& ts) const;

  /// Distance between glued points: same piece, or through a shared seam chart;
  /// +inf when neither applies.
  BigScalar distance(const GluedPoint& p, const GluedPoint& q) const;

  GluedPoint sample(std::mt19937_64& rng) const;
  /// Point at seam-chart height s (either sign) over a random tangential value.
  GluedPoint sample_near_seam(size_t seam, const BigScalar& s, std::mt19937_64& rng) const;

  stretch::CollarSpec collar(size_t piece, const std::string& comp) const;

 private:
  std::vector<ManifoldModel> pieces_;
  std::vector<Seam> seams_;
  std::vector<MapExpr> alpha_inv_;
};

json to_json(const GluedManifold& m);
GluedManifold glued_from_json(const json& j);

/// Gluing of two pieces along one pair of components.
GluedManifold glue_pair(const ManifoldModel& m1, const std::string& c1, const ManifoldModel& m2,
                        const std::string& c2, MapExpr alpha);
/// Identify two components of a single piece (annulus ends -> torus).
GluedManifold self_glue(const ManifoldModel& m, const std::string& c1, const std::string& c2, MapExpr alpha);
/// Concentric chain: piece i's `outer` component glued to piece i+1's `inner`, alpha = id.
GluedManifold chain(const std::vector<ManifoldModel>& pieces, const std::string& outer, const std::string& inner);
/// D(S): two copies of S glued by the identity along every boundary component.
GluedManifold double_of(const ManifoldModel& s);

struct CompatibilityReport {
  BigScalar max_defect;
  int samples = 0;
  bool compatible = false;
  std::string worst_seam;  ///< "piece/comp" with the largest defect
  std::string worst_point;

  json to_json() const;
};

/// max |alpha(f_a(x)) - f_b(alpha(x))| over boundary samples x of every seam.
/// Images are compared after canonicalization, so f_a may move x to another
/// glued component.
CompatibilityReport check_compatibility(const std::vector<MapExpr>& maps, const GluedManifold& host,
                                        int n_samples = 64, std::uint64_t seed = 1);

class IncompatibleMaps : public PreconditionError {
 public:
  explicit IncompatibleMaps(CompatibilityReport r);
  const CompatibilityReport& report() const { return report_; }

 private:
  CompatibilityReport report_;
};

/// g(f_1, ..., f_k): evaluates the map of the point's piece and canonicalizes.
class GluedMap {
 public:
  GluedMap(std::vector<MapExpr> maps, GluedManifold host);

  GluedPoint operator()(const GluedPoint& p) const;
  const std::vector<MapExpr>& maps() const { return maps_; }
  const GluedManifold& host() const { return host_; }

  /// Per-piece composition (this o other).
  GluedMap then_after(const GluedMap& other) const;
  GluedMap inverse() const;

  /// The map in seam-chart coordinates near `seam`; DomainError if the image
  /// leaves the seam neighbourhood.
  std::vector<geometry::Coord> in_seam_chart(size_t seam, const std::vector<geometry::Coord>& ts) const;

  json to_json() const;

 private:
  std::vector<MapExpr> maps_;
  GluedManifold host_;
};

/// Checks compatibility first; throws IncompatibleMaps with the report.
GluedMap glue_maps(const std::vector<MapExpr>& maps, const GluedManifold& host, int n_samples = 64);
inline GluedMap glue_maps(const MapExpr& f1, const MapExpr& f2, const GluedManifold& host) {
  return glue_maps(std::vector<MapExpr>{f1, f2}, host);
}

/// Psi for piece i: the stretch on each of its seam collars, identity elsewhere.
MapExpr piece_psi(const GluedManifold& host, size_t piece, const stretch::ProfilePtr& profile);

/// g(Psi_1^-1 f_1 Psi_1, ...).
GluedMap smooth_glue(const std::vector<MapExpr>& maps, const GluedManifold& host,
                     const stretch::ProfilePtr& profile, int n_samples = 64);

GluedMap glued_from_json_map(const json& j);

// ---- doubles -------------------------------------------------------------------

struct DoubleReport {
  std::string topology;
  int euler_characteristic = 0;
  BigScalar homomorphism_defect;  ///< max over samples of |(fg)~ - f~ g~|
  bool injective_on_samples = false;
  int samples = 0;

  json to_json() const;
};

/// f~ on D(S), smoothed by a single Psi used on both copies.
GluedMap double_map(const ManifoldModel& s, const MapExpr& f, const stretch::ProfilePtr& profile);

/// Homomorphism and injectivity of f -> f~ on the given maps and samples.
DoubleReport check_double(const ManifoldModel& s, const std::vector<MapExpr>& maps,
                          const stretch::ProfilePtr& profile, int samples, std::uint64_t seed);

/// Lifts of fixed points of f to D(S): two per interior point, one per boundary point.
std::vector<GluedPoint> lift_fixed_points(const GluedManifold& d, const std::vector<Point>& fixed);

}  // namespace bglue::glue
