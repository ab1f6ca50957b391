#include "bglue/geometry/manifold.hpp"

#include "bglue/errors.hpp"

namespace bglue::geometry {

Point BoundaryComponent::at(const BigScalar& t) const {
  const Chart& c = geometry::chart(this->chart);
  Vec x(static_cast<size_t>(c.dim), BigScalar(0));
  x[static_cast<size_t>(tangential)] = c.is_periodic(tangential) ? numeric::wrap(t, c.periods[tangential]) : t;
  return make_point(this->chart, x);
}

bool BoundaryComponent::contains(const Point& p) const {
  auto q = p.chart == this->chart ? std::optional<Point>(p) : try_to_chart(p, this->chart);
  return q && q->x[static_cast<size_t>(transverse)].is_zero();
}

const BoundaryComponent& ManifoldModel::component(const std::string& name) const {
  for (const auto& b : boundary)
    if (b.name == name) return b;
  throw DomainError("model '" + id + "' has no boundary component '" + name + "'");
}

Point ManifoldModel::canonicalize(const Point& p) const {
  for (const auto& pref : preferences) {
    auto q = pref.region.chart == p.chart ? std::optional<Point>(p) : try_to_chart(p, pref.region.chart);
    if (q && pref.region.contains(*q)) return *q;
  }
  if (p.chart == fallback_chart) return p;
  auto q = try_to_chart(p, fallback_chart);
  if (q) return *q;
  for (const auto& a : atlas)
    if (a == p.chart) return p;
  throw DomainError("point " + p.to_string() + " lies in no chart of model '" + id + "'");
}

BigScalar ManifoldModel::distance(const Point& p, const Point& q) const { return point_distance(p, q); }

BigScalar point_distance(const Point& p, const Point& q) {
  auto same = [](const Point& a, const Point& b) {
    return norm2(coordinate_difference(chart(a.chart), a.values(), b.values()));
  };
  if (p.chart == q.chart) return same(p, q);
  if (auto q2 = try_to_chart(q, p.chart)) return same(p, *q2);
  if (auto p2 = try_to_chart(p, q.chart)) return same(*p2, q);
  const Chart& cp = chart(p.chart);
  const Chart& cq = chart(q.chart);
  if (cp.ambient != cq.ambient) throw DomainError("distance: charts with different ambient spaces");
  Vec a = ambient_of(p), b = ambient_of(q);
  for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return norm2(a);
}

Point ManifoldModel::sample_interior(std::mt19937_64& rng) const {
  const Chart& c = chart(fallback_chart);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Point p = make_point(c.id, c.sample(rng));
    Point q = canonicalize(p);
    bool on_boundary = false;
    for (const auto& b : boundary) on_boundary = on_boundary || b.contains(q);
    if (!on_boundary) return q;
  }
  throw DomainError("model '" + id + "': could not sample an interior point");
}

Point ManifoldModel::sample_boundary(std::mt19937_64& rng) const {
  if (boundary.empty()) throw DomainError("model '" + id + "' has empty boundary");
  std::uniform_int_distribution<size_t> pick(0, boundary.size() - 1);
  std::uniform_real_distribution<double> t(-3.14159, 3.14159);
  const auto& b = boundary[pick(rng)];
  return b.at(BigScalar(t(rng)));
}

namespace {

ChartPreference prefer(const std::string& chart, int coord, double lo, double hi) {
  return {Region{chart, coord, BigScalar(lo), BigScalar(hi)}};
}

}  // namespace

ManifoldModel disk_model() {
  ManifoldModel m;
  m.id = "disk";
  m.atlas = {"disk", "disk_collar"};
  m.boundary = {{"S1", "disk_collar", 0, 1}};
  m.euler_characteristic = 1;
  m.preferences = {prefer("disk_collar", 1, 0, 0.5)};
  m.fallback_chart = "disk";
  return m;
}

ManifoldModel annulus_model() {
  ManifoldModel m;
  m.id = "annulus";
  m.atlas = {"annulus", "annulus_inner", "annulus_outer"};
  m.boundary = {{"inner", "annulus_inner", 0, 1}, {"outer", "annulus_outer", 0, 1}};
  m.euler_characteristic = 0;
  m.preferences = {prefer("annulus_inner", 1, 0, 0.5)};
  m.fallback_chart = "annulus_outer";
  return m;
}

ManifoldModel sphere_model() {
  ManifoldModel m;
  m.id = "sphere";
  m.atlas = {"S2", "ortho+x", "ortho-x", "band_x"};
  m.euler_characteristic = 2;
  m.fallback_chart = "S2";
  return m;
}

ManifoldModel plane_model() {
  ManifoldModel m;
  m.id = "plane";
  m.atlas = {"R2"};
  m.euler_characteristic = 1;
  m.fallback_chart = "R2";
  return m;
}

ManifoldModel torus_model(const BigScalar& alpha) {
  ManifoldModel m;
  m.id = "torus";
  m.param = alpha;
  m.fallback_chart = torus_chart(alpha).id;
  m.atlas = {m.fallback_chart};
  m.euler_characteristic = 0;
  return m;
}

ManifoldModel cylinder_model(const BigScalar& alpha) {
  ManifoldModel m;
  m.id = "cylinder";
  m.param = alpha;
  m.fallback_chart = cylinder_chart(alpha).id;
  m.atlas = {m.fallback_chart};
  m.euler_characteristic = 0;
  return m;
}

ManifoldModel calegari_model(const BigScalar& alpha) {
  ManifoldModel m;
  m.id = "calegari_sphere";
  m.param = alpha;
  m.fallback_chart = calegari_chart(alpha).id;
  m.atlas = {m.fallback_chart};
  m.euler_characteristic = 2;
  return m;
}

ManifoldModel heis_disk_model() {
  ManifoldModel m;
  m.id = "heis_disk";
  m.atlas = {"S2", "polar+x"};
  m.boundary = {{"e+", "polar+x", 0, 1}};
  m.euler_characteristic = 1;
  m.preferences = {prefer("polar+x", 1, 0, 0.5)};
  m.fallback_chart = "S2";
  return m;
}

ManifoldModel heis_annulus_model() {
  ManifoldModel m;
  m.id = "heis_annulus";
  m.atlas = {"S2", "polar+x", "polar-x"};
  m.boundary = {{"e+", "polar+x", 0, 1}, {"e-", "polar-x", 0, 1}};
  m.euler_characteristic = 0;
  m.preferences = {prefer("polar+x", 1, 0, 0.5), prefer("polar-x", 1, 0, 0.5)};
  m.fallback_chart = "S2";
  return m;
}

ManifoldModel model_by_id(const std::string& id, const BigScalar& param) {
  if (id == "disk") return disk_model();
  if (id == "annulus") return annulus_model();
  if (id == "sphere") return sphere_model();
  if (id == "plane") return plane_model();
  if (id == "torus") return torus_model(param);
  if (id == "cylinder") return cylinder_model(param);
  if (id == "calegari_sphere") return calegari_model(param);
  if (id == "heis_disk") return heis_disk_model();
  if (id == "heis_annulus") return heis_annulus_model();
  throw ParameterError("unknown manifold model '" + id + "'");
}

json to_json(const ManifoldModel& m) {
  json b = json::array();
  for (const auto& c : m.boundary)
    b.push_back({{"name", c.name}, {"chart", c.chart}, {"tangential", c.tangential}, {"transverse", c.transverse}});
  json j = {{"id", m.id}, {"atlas", m.atlas}, {"boundary", b}, {"euler_characteristic", m.euler_characteristic}};
  if (!m.param.is_zero()) j["alpha"] = scalar_to_json(m.param);
  return j;
}

ManifoldModel model_from_json(const json& j) {
  BigScalar alpha = j.contains("alpha") ? scalar_from_json(j.at("alpha")) : BigScalar(0);
  return model_by_id(j.at("id").get<std::string>(), alpha);
}

std::string closed_surface_name(int euler_characteristic) {
  if (euler_characteristic == 2) return "sphere";
  if (euler_characteristic == 0) return "torus";
  if (euler_characteristic < 0 && euler_characteristic % 2 == 0)
    return "genus-" + std::to_string(1 - euler_characteristic / 2) + " surface";
  return "non-orientable or open (chi=" + std::to_string(euler_characteristic) + ")";
}

}  // namespace bglue::geometry
