#include "bglue/geometry/chart.hpp"

#include <map>
#include <mutex>

#include "bglue/errors.hpp"
#include "bglue/geometry/linearize.hpp"

namespace bglue::geometry {

namespace {

BigScalar two_pi() { return BigScalar::pi() * BigScalar(2); }

/// Roundoff allowance for points computed just outside a boundary circle.
BigScalar edge_slack() { return BigScalar::pow2(-(numeric::working_precision() - 8)); }

BigScalar uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return BigScalar(d(rng));
}

Chart euclid_chart(int n) {
  Chart c;
  c.id = "R" + std::to_string(n);
  c.dim = n;
  c.ambient = c.id;
  c.ambient_dim = n;
  c.to_euclid = [](const Vec& v) { return v; };
  c.from_euclid = [](const Vec& v) -> std::optional<Vec> { return v; };
  c.contains = [](const Vec&) { return true; };
  c.sample = [n](std::mt19937_64& rng) {
    Vec v;
    for (int i = 0; i < n; ++i) v.push_back(uniform(rng, -2, 2));
    return v;
  };
  c.to_euclid_jacobian = [n](const Vec&) { return identity_matrix(n); };
  c.from_euclid_jacobian = [n](const Vec&) { return identity_matrix(n); };
  c.periods.assign(n, BigScalar(0));
  return c;
}

/// Derivative of q -> q / |q| at q.
Matrix normalize_jacobian(const Vec& q) {
  BigScalar n = norm2(q);
  Matrix j(q.size(), Vec(q.size()));
  for (size_t i = 0; i < q.size(); ++i)
    for (size_t k = 0; k < q.size(); ++k) {
      BigScalar v = -(q[i] * q[k]) / (n * n);
      if (i == k) v += BigScalar(1);
      j[i][k] = v / n;
    }
  return j;
}

Chart sphere_chart() {
  Chart c;
  c.id = "S2";
  c.dim = 3;
  c.ambient = "R3";
  c.ambient_dim = 3;
  c.to_euclid = [](const Vec& v) { return v; };
  c.from_euclid = [](const Vec& v) -> std::optional<Vec> {
    BigScalar n = norm2(v);
    if (n.is_zero()) return std::nullopt;
    return Vec{v[0] / n, v[1] / n, v[2] / n};
  };
  c.contains = [](const Vec& v) {
    return abs(norm2(v) - BigScalar(1)) < BigScalar::pow2(-(numeric::working_precision() / 2));
  };
  c.sample = [](std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec v{BigScalar(g(rng)), BigScalar(g(rng)), BigScalar(g(rng))};
    BigScalar n = norm2(v);
    return Vec{v[0] / n, v[1] / n, v[2] / n};
  };
  c.to_euclid_jacobian = [](const Vec&) { return identity_matrix(3); };
  c.from_euclid_jacobian = [](const Vec& q) { return normalize_jacobian(q); };
  c.periods.assign(3, BigScalar(0));
  return c;
}

/// Orthogonal projection (x, y, z) -> (y, z) on the hemisphere sign * x > 0.
Chart ortho_chart(int sign) {
  Chart c;
  c.id = sign > 0 ? "ortho+x" : "ortho-x";
  c.dim = 2;
  c.ambient = "R3";
  c.ambient_dim = 3;
  const BigScalar sg(sign);
  c.to_euclid = [sg](const Vec& v) {
    BigScalar s = sqrt(BigScalar(1) - v[0] * v[0] - v[1] * v[1]);
    return Vec{sg * s, v[0], v[1]};
  };
  c.from_euclid = [sign](const Vec& q) -> std::optional<Vec> {
    BigScalar n = norm2(q);
    if (n.is_zero() || q[0].sign() * sign <= 0) return std::nullopt;
    return Vec{q[1] / n, q[2] / n};
  };
  c.contains = [](const Vec& v) { return v[0] * v[0] + v[1] * v[1] < BigScalar(1); };
  c.sample = [](std::mt19937_64& rng) {
    BigScalar r = uniform(rng, 0.0, 0.95);
    BigScalar t = uniform(rng, -3.14159, 3.14159);
    return Vec{r * cos(t), r * sin(t)};
  };
  c.to_euclid_jacobian = [sg](const Vec& v) {
    BigScalar s = sqrt(BigScalar(1) - v[0] * v[0] - v[1] * v[1]);
    return Matrix{{-(sg * v[0]) / s, -(sg * v[1]) / s}, {BigScalar(1), BigScalar(0)}, {BigScalar(0), BigScalar(1)}};
  };
  c.from_euclid_jacobian = [](const Vec& q) {
    Matrix n = normalize_jacobian(q);
    return Matrix{n[1], n[2]};
  };
  c.periods.assign(2, BigScalar(0));
  return c;
}

/// Polar blow-up coordinates (t, r) over the orthogonal chart: the collar of
/// the circle that replaces (+-1, 0, 0).
Chart polar_chart(int sign) {
  Chart c;
  c.id = sign > 0 ? "polar+x" : "polar-x";
  c.dim = 2;
  c.ambient = "R3";
  c.ambient_dim = 3;
  const Chart base = ortho_chart(sign);
  c.to_euclid = [base](const Vec& v) { return base.to_euclid(Vec{v[1] * cos(v[0]), v[1] * sin(v[0])}); };
  c.from_euclid = [base](const Vec& q) -> std::optional<Vec> {
    auto yz = base.from_euclid(q);
    if (!yz) return std::nullopt;
    BigScalar r = hypot((*yz)[0], (*yz)[1]);
    if (r.is_zero() || !(r < BigScalar(1))) return std::nullopt;
    return Vec{atan2((*yz)[1], (*yz)[0]), r};
  };
  c.contains = [](const Vec& v) { return v[1].sign() >= 0 && v[1] < BigScalar(1); };
  c.sample = [](std::mt19937_64& rng) {
    return Vec{uniform(rng, -3.14159, 3.14159), uniform(rng, 0.001, 0.95)};
  };
  c.to_euclid_jacobian = [base](const Vec& v) {
    Vec yz{v[1] * cos(v[0]), v[1] * sin(v[0])};
    Matrix inner{{-(v[1] * sin(v[0])), cos(v[0])}, {v[1] * cos(v[0]), sin(v[0])}};
    return matmul(base.to_euclid_jacobian(yz), inner);
  };
  c.periods = {two_pi(), BigScalar(0)};
  return c;
}

/// Plane polar coordinates (t, r), the blow-up of R2 at the origin.
Chart plane_polar_chart() {
  Chart c;
  c.id = "polar";
  c.dim = 2;
  c.ambient = "R2";
  c.ambient_dim = 2;
  c.to_euclid = [](const Vec& v) { return Vec{v[1] * cos(v[0]), v[1] * sin(v[0])}; };
  c.from_euclid = [](const Vec& q) -> std::optional<Vec> {
    BigScalar r = hypot(q[0], q[1]);
    if (r.is_zero()) return std::nullopt;
    return Vec{atan2(q[1], q[0]), r};
  };
  c.contains = [](const Vec& v) { return v[1].sign() >= 0; };
  c.sample = [](std::mt19937_64& rng) {
    return Vec{uniform(rng, -3.14159, 3.14159), uniform(rng, 0.001, 3.0)};
  };
  c.to_euclid_jacobian = [](const Vec& v) {
    return Matrix{{-(v[1] * sin(v[0])), cos(v[0])}, {v[1] * cos(v[0]), sin(v[0])}};
  };
  c.periods = {two_pi(), BigScalar(0)};
  return c;
}

/// Equatorial band (longitude about the x axis, x) on |x| < 1.
Chart band_chart() {
  Chart c;
  c.id = "band_x";
  c.dim = 2;
  c.ambient = "R3";
  c.ambient_dim = 3;
  c.to_euclid = [](const Vec& v) {
    BigScalar s = sqrt(BigScalar(1) - v[1] * v[1]);
    return Vec{v[1], s * cos(v[0]), s * sin(v[0])};
  };
  c.from_euclid = [](const Vec& q) -> std::optional<Vec> {
    BigScalar n = norm2(q);
    if (n.is_zero()) return std::nullopt;
    BigScalar x = q[0] / n;
    if (!(abs(x) < BigScalar(1)) || (q[1].is_zero() && q[2].is_zero())) return std::nullopt;
    return Vec{atan2(q[2], q[1]), x};
  };
  c.contains = [](const Vec& v) { return abs(v[1]) < BigScalar(1); };
  c.sample = [](std::mt19937_64& rng) {
    return Vec{uniform(rng, -3.14159, 3.14159), uniform(rng, -0.95, 0.95)};
  };
  c.periods = {two_pi(), BigScalar(0)};
  return c;
}

Chart disk_chart() {
  Chart c = euclid_chart(2);
  c.id = "disk";
  c.ambient = "R2";
  c.contains = [](const Vec& v) { return v[0] * v[0] + v[1] * v[1] <= BigScalar(1) + edge_slack(); };
  c.from_euclid = [](const Vec& v) -> std::optional<Vec> {
    if (v[0] * v[0] + v[1] * v[1] > BigScalar(1) + edge_slack()) return std::nullopt;
    return v;
  };
  c.sample = [](std::mt19937_64& rng) {
    BigScalar r = sqrt(uniform(rng, 0.0, 0.98));
    BigScalar t = uniform(rng, -3.14159, 3.14159);
    return Vec{r * cos(t), r * sin(t)};
  };
  return c;
}

/// Collar (theta, s) of the unit circle, s = 1 - r.
Chart disk_collar_chart() {
  Chart c;
  c.id = "disk_collar";
  c.dim = 2;
  c.ambient = "R2";
  c.ambient_dim = 2;
  c.to_euclid = [](const Vec& v) {
    BigScalar r = BigScalar(1) - v[1];
    return Vec{r * cos(v[0]), r * sin(v[0])};
  };
  c.from_euclid = [](const Vec& q) -> std::optional<Vec> {
    BigScalar r = hypot(q[0], q[1]);
    if (r.is_zero() || r > BigScalar(1) + edge_slack()) return std::nullopt;
    BigScalar s = BigScalar(1) - r;
    return Vec{atan2(q[1], q[0]), s.sign() < 0 ? BigScalar(0) : s};
  };
  c.contains = [](const Vec& v) { return v[1].sign() >= 0 && v[1] < BigScalar(1); };
  c.sample = [](std::mt19937_64& rng) {
    return Vec{uniform(rng, -3.14159, 3.14159), uniform(rng, 0.0, 0.95)};
  };
  c.to_euclid_jacobian = [](const Vec& v) {
    BigScalar r = BigScalar(1) - v[1];
    return Matrix{{-(r * sin(v[0])), -cos(v[0])}, {r * cos(v[0]), -sin(v[0])}};
  };
  c.periods = {two_pi(), BigScalar(0)};
  return c;
}

/// Annulus S^1 x [0, 1] embedded with radius 1 + rho.
Chart annulus_chart(const std::string& id, bool outer_collar) {
  Chart c;
  c.id = id;
  c.dim = 2;
  c.ambient = "R2";
  c.ambient_dim = 2;
  // second coordinate: rho for the main chart and inner collar, 1 - rho for the outer collar
  c.to_euclid = [outer_collar](const Vec& v) {
    BigScalar rho = outer_collar ? BigScalar(1) - v[1] : v[1];
    BigScalar r = BigScalar(1) + rho;
    return Vec{r * cos(v[0]), r * sin(v[0])};
  };
  c.from_euclid = [outer_collar](const Vec& q) -> std::optional<Vec> {
    BigScalar r = hypot(q[0], q[1]);
    BigScalar rho = r - BigScalar(1);
    if (rho < -edge_slack() || rho > BigScalar(1) + edge_slack()) return std::nullopt;
    if (rho.sign() < 0) rho = BigScalar(0);
    if (rho > BigScalar(1)) rho = BigScalar(1);
    return Vec{atan2(q[1], q[0]), outer_collar ? BigScalar(1) - rho : rho};
  };
  c.contains = [](const Vec& v) { return v[1].sign() >= 0 && v[1] <= BigScalar(1); };
  c.sample = [](std::mt19937_64& rng) {
    return Vec{uniform(rng, -3.14159, 3.14159), uniform(rng, 0.0, 0.99)};
  };
  c.periods = {two_pi(), BigScalar(0)};
  return c;
}

}  // namespace

struct ChartRegistry::Impl {
  mutable std::mutex mu;
  std::map<std::string, std::unique_ptr<Chart>, std::less<>> charts;
};

ChartRegistry::ChartRegistry() : impl_(std::make_shared<Impl>()) {
  auto put = [this](Chart c) {
    std::string id = c.id;
    impl_->charts.emplace(std::move(id), std::make_unique<Chart>(std::move(c)));
  };
  numeric::PrecisionScope scope(numeric::kDefaultPrecisionBits);
  for (int n = 1; n <= 4; ++n) put(euclid_chart(n));
  put(sphere_chart());
  put(ortho_chart(1));
  put(ortho_chart(-1));
  put(polar_chart(1));
  put(polar_chart(-1));
  put(plane_polar_chart());
  put(band_chart());
  put(disk_chart());
  put(disk_collar_chart());
  put(annulus_chart("annulus", false));
  put(annulus_chart("annulus_inner", false));
  put(annulus_chart("annulus_outer", true));
}

ChartRegistry& ChartRegistry::instance() {
  static ChartRegistry reg;
  return reg;
}

const Chart& ChartRegistry::add(Chart chart) {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->charts.find(chart.id);
  if (it != impl_->charts.end()) return *it->second;
  auto id = chart.id;
  auto [pos, _] = impl_->charts.emplace(id, std::make_unique<Chart>(std::move(chart)));
  return *pos->second;
}

const Chart& ChartRegistry::get(std::string_view id) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->charts.find(id);
  if (it == impl_->charts.end()) throw DomainError("unknown chart '" + std::string(id) + "'");
  return *it->second;
}

bool ChartRegistry::has(std::string_view id) const {
  std::lock_guard lock(impl_->mu);
  return impl_->charts.find(id) != impl_->charts.end();
}

std::vector<std::string> ChartRegistry::ids() const {
  std::lock_guard lock(impl_->mu);
  std::vector<std::string> out;
  for (const auto& [k, _] : impl_->charts) out.push_back(k);
  return out;
}

const Chart& chart(std::string_view id) { return ChartRegistry::instance().get(id); }

std::optional<Point> try_to_chart(const Point& p, const std::string& target) {
  if (p.chart == target) return p;
  const Chart& src = chart(p.chart);
  const Chart& dst = chart(target);
  if (src.ambient != dst.ambient) return std::nullopt;
  bool outside = false;
  auto convert = [&](const Point& q) {
    auto e = src.to_euclid(q.values());
    auto v = dst.from_euclid(e);
    if (!v || !dst.contains(*v)) {
      outside = true;
      return Point(target, std::vector<Coord>(dst.dim, Coord(BigScalar(0))));
    }
    return make_point(target, *v);
  };
  Point out = linearized_apply(convert, p);
  if (outside) return std::nullopt;
  return out;
}

Point to_chart(const Point& p, const std::string& target) {
  auto r = try_to_chart(p, target);
  if (!r) throw DomainError("point " + p.to_string() + " is not in chart '" + target + "'");
  return *r;
}

Vec ambient_of(const Point& p) { return chart(p.chart).to_euclid(p.values()); }

Vec coordinate_difference(const Chart& c, const Vec& a, const Vec& b) {
  Vec d(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    d[i] = a[i] - b[i];
    if (c.is_periodic(i)) {
      const BigScalar& p = c.periods[i];
      BigScalar half = p / BigScalar(2);
      d[i] = numeric::wrap(d[i] + half, p) - half;
    }
  }
  return d;
}

std::string param_tag(const BigScalar& v) { return v.to_string(25); }

const Chart& torus_chart(const BigScalar& alpha) {
  std::string id = "torus[" + param_tag(alpha) + "]";
  if (ChartRegistry::instance().has(id)) return chart(id);
  Chart c;
  c.id = id;
  c.dim = 2;
  c.ambient = "R4";
  c.ambient_dim = 4;
  // Flat embedding in R^4 by two circles of circumference alpha.
  c.to_euclid = [alpha](const Vec& v) {
    BigScalar k = BigScalar::pi() * BigScalar(2) / alpha;
    BigScalar rad = alpha / (BigScalar::pi() * BigScalar(2));
    return Vec{rad * cos(k * v[0]), rad * sin(k * v[0]), rad * cos(k * v[1]), rad * sin(k * v[1])};
  };
  c.from_euclid = [alpha](const Vec& q) -> std::optional<Vec> {
    BigScalar k = alpha / (BigScalar::pi() * BigScalar(2));
    return Vec{numeric::wrap(atan2(q[1], q[0]) * k, alpha), numeric::wrap(atan2(q[3], q[2]) * k, alpha)};
  };
  c.contains = [alpha](const Vec& v) {
    return v[0].sign() >= 0 && v[0] < alpha && v[1].sign() >= 0 && v[1] < alpha;
  };
  c.sample = [alpha](std::mt19937_64& rng) {
    return Vec{uniform(rng, 0, 1) * alpha, uniform(rng, 0, 1) * alpha};
  };
  c.periods = {alpha, alpha};
  return ChartRegistry::instance().add(std::move(c));
}

const Chart& cylinder_chart(const BigScalar& alpha) {
  std::string id = "cyl[" + param_tag(alpha) + "]";
  if (ChartRegistry::instance().has(id)) return chart(id);
  Chart c;
  c.id = id;
  c.dim = 2;
  c.ambient = "R3";
  c.ambient_dim = 3;
  c.to_euclid = [alpha](const Vec& v) {
    BigScalar k = BigScalar::pi() * BigScalar(2) / alpha;
    BigScalar rad = alpha / (BigScalar::pi() * BigScalar(2));
    return Vec{rad * cos(k * v[0]), rad * sin(k * v[0]), v[1]};
  };
  c.from_euclid = [alpha](const Vec& q) -> std::optional<Vec> {
    BigScalar k = alpha / (BigScalar::pi() * BigScalar(2));
    return Vec{numeric::wrap(atan2(q[1], q[0]) * k, alpha), q[2]};
  };
  c.contains = [alpha](const Vec& v) { return v[0].sign() >= 0 && v[0] < alpha; };
  c.sample = [alpha](std::mt19937_64& rng) {
    return Vec{uniform(rng, 0, 1) * alpha, uniform(rng, -3, 3)};
  };
  c.periods = {alpha, BigScalar(0)};
  return ChartRegistry::instance().add(std::move(c));
}

const Chart& calegari_chart(const BigScalar& alpha) {
  std::string id = "calegari[" + param_tag(alpha) + "]";
  if (ChartRegistry::instance().has(id)) return chart(id);
  Chart c;
  c.id = id;
  c.dim = 2;
  c.ambient = "R3";
  c.ambient_dim = 3;
  c.to_euclid = [alpha](const Vec& v) {
    BigScalar k = BigScalar::pi() * BigScalar(2) / alpha;
    return Vec{cos(v[1]) * cos(k * v[0]), cos(v[1]) * sin(k * v[0]), sin(v[1])};
  };
  c.from_euclid = [alpha](const Vec& q) -> std::optional<Vec> {
    if (norm2(q).is_zero()) return std::nullopt;
    BigScalar k = alpha / (BigScalar::pi() * BigScalar(2));
    return Vec{numeric::wrap(atan2(q[1], q[0]) * k, alpha), atan2(q[2], hypot(q[0], q[1]))};
  };
  c.contains = [alpha](const Vec& v) {
    BigScalar half = BigScalar::pi() / BigScalar(2);
    return v[0].sign() >= 0 && v[0] < alpha && abs(v[1]) <= half;
  };
  c.sample = [alpha](std::mt19937_64& rng) {
    return Vec{uniform(rng, 0, 1) * alpha, uniform(rng, -1.5, 1.5)};
  };
  c.periods = {alpha, BigScalar(0)};
  return ChartRegistry::instance().add(std::move(c));
}

BigScalar chart_roundtrip_error(const Chart& c, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BigScalar worst;
  for (int i = 0; i < n; ++i) {
    Vec p = c.sample(rng);
    auto back = c.from_euclid(c.to_euclid(p));
    if (!back) return BigScalar::infinity();
    Vec d = coordinate_difference(c, *back, p);
    BigScalar scale = max(norm2(p), BigScalar(1));
    BigScalar err = norm2(d) / scale;
    if (err > worst) worst = err;
  }
  return worst;
}

}  // namespace bglue::geometry
