#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bglue/geometry/manifold.hpp"
#include "bglue/geometry/map_expr.hpp"

namespace bglue::blowup {

using geometry::json;
using geometry::MapExpr;
using geometry::Matrix;
using geometry::Point;
using geometry::Vec;
using numeric::BigScalar;

/// A point to blow up: `chart` sends it to the origin and `polar` is the
/// chart (t, r) with blow-down (r cos t, r sin t) in `chart`.
struct BlowupSite {
  std::string ambient_chart;  ///< chart the point itself is given in
  Vec point;
  std::string chart;
  std::string polar;
};

/// The global fixed points (+-1, 0, 0) of the projective Heisenberg action.
BlowupSite sphere_site(int sign);
/// The origin of the plane, polar chart "polar".
BlowupSite plane_origin_site();

/// beta(theta, r) = r theta. DomainError unless |theta| = 1 and r >= 0.
Vec blow_down(const Vec& theta, const BigScalar& r);
/// (p / |p|, |p|). DomainError for p = 0.
std::pair<Vec, BigScalar> blow_up_pt(const Vec& p);

/// D_0 of f in the coordinates of site.chart: closed form when f carries a
/// registered Jacobian, finite differences otherwise.
Matrix origin_derivative(const MapExpr& f, const BlowupSite& site);

/// The induced map on the blow-up at every site: beta^-1 f beta for r > 0 and
/// theta -> D0 theta / |D0 theta| on r = 0. PreconditionError if f moves a site.
MapExpr induced_map(const MapExpr& f, const std::vector<BlowupSite>& sites);
inline MapExpr induced_map(const MapExpr& f, const BlowupSite& site) {
  return induced_map(f, std::vector<BlowupSite>{site});
}

struct FunctorialityReport {
  BigScalar interior_defect;
  BigScalar boundary_defect;
  int interior_samples = 0;
  int boundary_samples = 0;
  BigScalar max_defect() const { return interior_defect > boundary_defect ? interior_defect : boundary_defect; }
};

/// max |(f o g)~ - f~ o g~| over polar-chart samples at the first site
/// (interior r in (0, 0.9) and r = 0).
FunctorialityReport functoriality_check(const MapExpr& f, const MapExpr& g, const std::vector<BlowupSite>& sites,
                                        int samples, int boundary_samples, std::uint64_t seed);

/// Fixed points of the boundary circle map t -> t' of an induced map at a
/// site, found as zeros of the wrapped angle displacement (grid scan plus
/// local minimization, which also catches tangential zeros).
std::vector<BigScalar> boundary_fixed_points(const MapExpr& induced, const BlowupSite& site, int grid = 720);

json site_to_json(const BlowupSite& s);
BlowupSite site_from_json(const json& j);

void register_node_kinds();

}  // namespace bglue::blowup
