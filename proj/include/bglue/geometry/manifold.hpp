#pragma once

#include <random>
#include <string>
#include <vector>

#include "bglue/geometry/map_expr.hpp"

namespace bglue::geometry {

/// A boundary component given as the zero set of one coordinate of a collar chart.
struct BoundaryComponent {
  std::string name;
  std::string chart;
  int tangential = 0;  ///< coordinate parameterizing the component (periodic)
  int transverse = 1;  ///< collar coordinate, 0 on the component

  /// Point of the component at parameter t.
  Point at(const BigScalar& t) const;
  bool contains(const Point& p) const;
};

/// Preferred chart for canonical representatives: used when p converts to
/// `region.chart` with its coordinate inside the region.
struct ChartPreference {
  Region region;
};

struct ManifoldModel {
  std::string id;
  BigScalar param;  ///< alpha for torus / cylinder / calegari models, unused otherwise
  std::vector<std::string> atlas;
  std::vector<BoundaryComponent> boundary;
  int euler_characteristic = 0;
  std::vector<ChartPreference> preferences;
  std::string fallback_chart;

  const BoundaryComponent& component(const std::string& name) const;
  /// Canonical chart representative; DomainError if p lies in no chart of the atlas.
  Point canonicalize(const Point& p) const;
  /// Coordinate distance after moving q into p's chart (or both to the ambient space).
  BigScalar distance(const Point& p, const Point& q) const;
  /// Interior sample, canonicalized.
  Point sample_interior(std::mt19937_64& rng) const;
  /// Boundary sample on a uniformly chosen component.
  Point sample_boundary(std::mt19937_64& rng) const;
  bool has_boundary() const { return !boundary.empty(); }
};

// The listed models. Parameterized ones take alpha.
ManifoldModel disk_model();
ManifoldModel annulus_model();
ManifoldModel sphere_model();
ManifoldModel plane_model();
ManifoldModel torus_model(const BigScalar& alpha);
ManifoldModel cylinder_model(const BigScalar& alpha);
ManifoldModel calegari_model(const BigScalar& alpha);
/// S^2 blown up at (1, 0, 0): a closed disk with boundary circle "e+".
ManifoldModel heis_disk_model();
/// S^2 blown up at (+-1, 0, 0): an annulus with boundary circles "e+" and "e-".
ManifoldModel heis_annulus_model();

ManifoldModel model_by_id(const std::string& id, const BigScalar& param = BigScalar(0));

json to_json(const ManifoldModel& m);
ManifoldModel model_from_json(const json& j);

/// Coordinate distance between points of one model: q is moved into p's chart
/// (or p into q's); otherwise the ambient Euclidean distance is used.
BigScalar point_distance(const Point& p, const Point& q);

/// Topological name from Euler characteristic for closed orientable surfaces.
std::string closed_surface_name(int euler_characteristic);

}  // namespace bglue::geometry
