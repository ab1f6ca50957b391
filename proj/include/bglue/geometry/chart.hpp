#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "bglue/geometry/point.hpp"

namespace bglue::geometry {

using Vec = std::vector<BigScalar>;

/// A coordinate chart with closed-form maps to and from a Euclidean
/// ambient space. Charts are registered once by id and then shared.
struct Chart {
  std::string id;
  int dim = 0;
  std::string ambient;  ///< id of the Euclidean chart ("R2", "R3", ...)
  int ambient_dim = 0;

  std::function<Vec(const Vec&)> to_euclid;
  /// nullopt when the ambient point is outside the chart.
  std::function<std::optional<Vec>(const Vec&)> from_euclid;
  std::function<bool(const Vec&)> contains;
  /// Interior point drawn from `rng`.
  std::function<Vec(std::mt19937_64&)> sample;

  /// Optional closed-form Jacobians (empty std::function if unavailable).
  std::function<Matrix(const Vec&)> to_euclid_jacobian;
  std::function<Matrix(const Vec&)> from_euclid_jacobian;  ///< evaluated at the ambient point

  /// Per-coordinate period (zero for non-periodic coordinates).
  std::vector<BigScalar> periods;

  bool is_periodic(size_t i) const { return i < periods.size() && !periods[i].is_zero(); }
};

class ChartRegistry {
 public:
  static ChartRegistry& instance();

  /// Registers `chart` unless a chart with the same id exists; returns the stored chart.
  const Chart& add(Chart chart);
  const Chart& get(std::string_view id) const;
  bool has(std::string_view id) const;
  std::vector<std::string> ids() const;

 private:
  ChartRegistry();
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

const Chart& chart(std::string_view id);

/// Re-express p in the target chart through the ambient space. Coordinates
/// below the sub-range threshold are carried by linearization.
std::optional<Point> try_to_chart(const Point& p, const std::string& target);
Point to_chart(const Point& p, const std::string& target);

/// Ambient (Euclidean) coordinates of p.
Vec ambient_of(const Point& p);

/// a - b componentwise, periodic coordinates wrapped to (-P/2, P/2].
Vec coordinate_difference(const Chart& c, const Vec& a, const Vec& b);

/// Format used inside parameterized chart ids ("torus[0.4142...]").
std::string param_tag(const BigScalar& v);

// Parameterized charts. Each call registers the chart (idempotent) and returns it.
const Chart& torus_chart(const BigScalar& alpha);
const Chart& cylinder_chart(const BigScalar& alpha);
/// Cylinder R/(alpha Z) x R compactified at both ends: coordinates (x, h) with
/// height y = tan(h), h in [-pi/2, pi/2]; the poles are h = +-pi/2.
const Chart& calegari_chart(const BigScalar& alpha);

/// Chart round-trip check: max relative error of from_euclid(to_euclid(p)) over
/// n sampled points.
BigScalar chart_roundtrip_error(const Chart& c, int n, std::uint64_t seed);

}  // namespace bglue::geometry
