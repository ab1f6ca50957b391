#include "bglue/glue/glue.hpp"

#include <set>

#include "bglue/numeric/tolerance.hpp"

namespace bglue::glue {

using geometry::Coord;
using geometry::chart;
using geometry::make_point;

namespace {

Coord negated(const Coord& c) {
  if (c.is_log()) return Coord(-c.log());
  return Coord(-c.big());
}

BigScalar seam_eps() { return numeric::TolerancePolicy{numeric::working_precision()}.seam_eps; }

bool within_seam(const Coord& s) {
  const BigScalar eps = seam_eps();
  return s.compare(eps) < 0 && s.compare(-eps) > 0;
}

BigScalar apply_r1(const MapExpr& f, const BigScalar& t) {
  return geometry::evaluate(f, make_point("R1", {t})).x[0].big();
}

/// Representative of t in (-P/2, P/2] for a periodic tangential coordinate.
BigScalar wrap_tangential(const geometry::Chart& c, int coord, const BigScalar& t) {
  if (!c.is_periodic(static_cast<size_t>(coord))) return t;
  const BigScalar& p = c.periods[static_cast<size_t>(coord)];
  const BigScalar half = p / BigScalar(2);
  if (-half < t && t <= half) return t;
  return half - numeric::wrap(half - t, p);
}

/// Collar-chart coordinates of p when it lies in the collar [0, depth).
std::optional<Point> in_collar(const Point& p, const stretch::CollarSpec& c) {
  auto q = p.chart == c.chart ? std::optional<Point>(p) : geometry::try_to_chart(p, c.chart);
  if (!q) return std::nullopt;
  const Coord& r = q->x[static_cast<size_t>(c.transverse)];
  if (r.sign() < 0 || r.compare(c.depth) >= 0) return std::nullopt;
  return q;
}

Point collar_point(const stretch::CollarSpec& c, const BigScalar& t, const Coord& r) {
  const int dim = chart(c.chart).dim;
  Point p(c.chart, std::vector<Coord>(static_cast<size_t>(dim), Coord(BigScalar(0))));
  p.x[static_cast<size_t>(c.tangential)] = t;
  p.x[static_cast<size_t>(c.transverse)] = r;
  return p;
}

}  // namespace

std::string GluedPoint::to_string(int digits) const {
  return "piece" + std::to_string(piece) + ":" + point.to_string(digits);
}

// ---- GluedManifold -----------------------------------------------------------------

GluedManifold::GluedManifold(std::vector<ManifoldModel> pieces, std::vector<Seam> seams)
    : pieces_(std::move(pieces)), seams_(std::move(seams)) {
  if (pieces_.empty()) throw ConstructionError("glued manifold needs at least one piece");
  std::set<std::pair<size_t, std::string>> used;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> t(-3.1, 3.1);
  for (const auto& s : seams_) {
    if (s.piece_a >= pieces_.size() || s.piece_b >= pieces_.size()) throw ConstructionError("seam names a missing piece");
    pieces_[s.piece_a].component(s.comp_a);
    pieces_[s.piece_b].component(s.comp_b);
    for (const auto& side : {std::make_pair(s.piece_a, s.comp_a), std::make_pair(s.piece_b, s.comp_b)}) {
      if (!used.insert(side).second) {
        throw ConstructionError("boundary component " + pieces_[side.first].id + "/" + side.second +
                                " is glued twice");
      }
    }
    if (s.alpha.empty()) throw ConstructionError("seam without a gluing map");
    MapExpr inv;
    try {
      inv = geometry::invert(s.alpha);
    } catch (const UnsupportedError& e) {
      throw ConstructionError(std::string("gluing map has no closed-form inverse: ") + e.what());
    }
    const auto cb = collar(s.piece_b, s.comp_b);
    const auto& chart_b = chart(cb.chart);
    numeric::TolerancePolicy tol{numeric::working_precision()};
    for (int i = 0; i < 16; ++i) {
      BigScalar x(t(rng));
      BigScalar back = apply_r1(inv, apply_r1(s.alpha, x));
      BigScalar d = abs(wrap_tangential(chart_b, cb.tangential, back - x));
      if (d > tol.path_defect()) throw ConstructionError("gluing map fails its inverse round trip at t=" + x.to_string(8));
    }
    alpha_inv_.push_back(std::move(inv));
  }
}

const ManifoldModel& GluedManifold::piece(size_t i) const {
  if (i >= pieces_.size()) throw DomainError("no piece " + std::to_string(i));
  return pieces_[i];
}

int GluedManifold::euler_characteristic() const {
  int chi = 0;
  for (const auto& p : pieces_) chi += p.euler_characteristic;
  return chi;
}

std::vector<std::pair<size_t, std::string>> GluedManifold::free_boundary() const {
  std::vector<std::pair<size_t, std::string>> out;
  for (size_t i = 0; i < pieces_.size(); ++i)
    for (const auto& b : pieces_[i].boundary)
      if (!seam_of(i, b.name)) out.emplace_back(i, b.name);
  return out;
}

std::string GluedManifold::topology() const {
  const int chi = euler_characteristic();
  if (closed()) return geometry::closed_surface_name(chi);
  return "surface with " + std::to_string(free_boundary().size()) + " boundary circle(s), chi=" + std::to_string(chi);
}

std::optional<size_t> GluedManifold::seam_of(size_t piece, const std::string& comp) const {
  for (size_t i = 0; i < seams_.size(); ++i) {
    const auto& s = seams_[i];
    if ((s.piece_a == piece && s.comp_a == comp) || (s.piece_b == piece && s.comp_b == comp)) return i;
  }
  return std::nullopt;
}

stretch::CollarSpec GluedManifold::collar(size_t piece, const std::string& comp) const {
  return stretch::collar_of(this->piece(piece), comp);
}

GluedPoint GluedManifold::canonicalize(const GluedPoint& p) const {
  for (size_t i = 0; i < seams_.size(); ++i) {
    const auto& s = seams_[i];
    if (p.piece != s.piece_a) continue;
    const auto ca = collar(s.piece_a, s.comp_a);
    auto q = in_collar(p.point, ca);
    if (!q || !within_seam(q->x[static_cast<size_t>(ca.transverse)])) continue;
    const auto cb = collar(s.piece_b, s.comp_b);
    BigScalar t = apply_r1(s.alpha, q->x[static_cast<size_t>(ca.tangential)].big());
    t = wrap_tangential(chart(cb.chart), cb.tangential, t);
    return {s.piece_b, pieces_[s.piece_b].canonicalize(collar_point(cb, t, Coord(BigScalar(0))))};
  }
  GluedPoint out{p.piece, piece(p.piece).canonicalize(p.point)};
  // Snap b-side points within seam_eps onto the seam itself.
  for (const auto& s : seams_) {
    if (p.piece != s.piece_b) continue;
    const auto cb = collar(s.piece_b, s.comp_b);
    auto q = in_collar(out.point, cb);
    if (!q) continue;
    Coord& r = q->x[static_cast<size_t>(cb.transverse)];
    if (within_seam(r) && !r.is_zero()) {
      r = Coord(BigScalar(0));
      out.point = *q;
    }
  }
  return out;
}

std::optional<std::vector<Coord>> GluedManifold::to_seam(size_t seam, const GluedPoint& p) const {
  const Seam& s = seams_.at(seam);
  if (p.piece == s.piece_a) {
    const auto ca = collar(s.piece_a, s.comp_a);
    if (auto q = in_collar(p.point, ca)) {
      const auto cb = collar(s.piece_b, s.comp_b);
      BigScalar t = apply_r1(s.alpha, q->x[static_cast<size_t>(ca.tangential)].big());
      return std::vector<Coord>{wrap_tangential(chart(cb.chart), cb.tangential, t),
                                q->x[static_cast<size_t>(ca.transverse)]};
    }
  }
  if (p.piece == s.piece_b) {
    const auto cb = collar(s.piece_b, s.comp_b);
    if (auto q = in_collar(p.point, cb)) {
      return std::vector<Coord>{q->x[static_cast<size_t>(cb.tangential)],
                                negated(q->x[static_cast<size_t>(cb.transverse)])};
    }
  }
  return std::nullopt;
}

GluedPoint GluedManifold::from_seam(size_t seam, const std::vector<Coord>& ts) const {
  const Seam& s = seams_.at(seam);
  if (ts.size() != 2) throw DomainError("seam coordinates are (t, s)");
  const BigScalar t = ts[0].big();
  const Coord& h = ts[1];
  if (h.sign() > 0 && !within_seam(h)) {
    const auto ca = collar(s.piece_a, s.comp_a);
    if (h.compare(ca.depth) >= 0) throw DomainError("seam height " + h.to_string(8) + " beyond the a-side collar");
    BigScalar ta = wrap_tangential(chart(ca.chart), ca.tangential, apply_r1(alpha_inv_[seam], t));
    return {s.piece_a, collar_point(ca, ta, h)};
  }
  const auto cb = collar(s.piece_b, s.comp_b);
  Coord r = within_seam(h) ? Coord(BigScalar(0)) : negated(h);
  if (r.compare(cb.depth) >= 0) throw DomainError("seam height " + h.to_string(8) + " beyond the b-side collar");
  return {s.piece_b, collar_point(cb, t, r)};
}

BigScalar GluedManifold::distance(const GluedPoint& p, const GluedPoint& q) const {
  BigScalar best = BigScalar::infinity();
  if (p.piece == q.piece) best = geometry::point_distance(p.point, q.point);
  for (size_t i = 0; i < seams_.size(); ++i) {
    const auto& s = seams_[i];
    const bool links = (p.piece == s.piece_a || p.piece == s.piece_b) && (q.piece == s.piece_a || q.piece == s.piece_b);
    if (!links) continue;
    auto a = to_seam(i, p);
    auto b = to_seam(i, q);
    if (!a || !b) continue;
    const auto cb = collar(s.piece_b, s.comp_b);
    BigScalar dt = wrap_tangential(chart(cb.chart), cb.tangential, (*a)[0].big() - (*b)[0].big());
    BigScalar ds = (*a)[1].big() - (*b)[1].big();
    best = min(best, hypot(dt, ds));
  }
  return best;
}

GluedPoint GluedManifold::sample(std::mt19937_64& rng) const {
  std::uniform_int_distribution<size_t> pick(0, pieces_.size() - 1);
  size_t i = pick(rng);
  return canonicalize({i, pieces_[i].sample_interior(rng)});
}

GluedPoint GluedManifold::sample_near_seam(size_t seam, const BigScalar& s, std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> t(-3.1, 3.1);
  return from_seam(seam, {Coord(BigScalar(t(rng))), Coord(s)});
}

json to_json(const GluedManifold& m) {
  json pieces = json::array();
  for (const auto& p : m.pieces()) pieces.push_back(geometry::to_json(p));
  json seams = json::array();
  for (const auto& s : m.seams()) {
    seams.push_back({{"piece_a", s.piece_a},
                     {"comp_a", s.comp_a},
                     {"piece_b", s.piece_b},
                     {"comp_b", s.comp_b},
                     {"alpha", geometry::to_json(s.alpha)}});
  }
  return {{"pieces", pieces}, {"seams", seams}};
}

GluedManifold glued_from_json(const json& j) {
  std::vector<ManifoldModel> pieces;
  for (const auto& p : j.at("pieces")) pieces.push_back(geometry::model_from_json(p));
  std::vector<Seam> seams;
  for (const auto& s : j.at("seams")) {
    seams.push_back({s.at("piece_a").get<size_t>(), s.at("comp_a").get<std::string>(), s.at("piece_b").get<size_t>(),
                     s.at("comp_b").get<std::string>(), geometry::map_from_json(s.at("alpha"))});
  }
  return GluedManifold(std::move(pieces), std::move(seams));
}

GluedManifold glue_pair(const ManifoldModel& m1, const std::string& c1, const ManifoldModel& m2,
                        const std::string& c2, MapExpr alpha) {
  return GluedManifold({m1, m2}, {Seam{0, c1, 1, c2, std::move(alpha)}});
}

GluedManifold self_glue(const ManifoldModel& m, const std::string& c1, const std::string& c2, MapExpr alpha) {
  if (c1 == c2) throw ConstructionError("self-gluing needs two distinct components");
  return GluedManifold({m}, {Seam{0, c1, 0, c2, std::move(alpha)}});
}

GluedManifold chain(const std::vector<ManifoldModel>& pieces, const std::string& outer, const std::string& inner) {
  std::vector<Seam> seams;
  for (size_t i = 0; i + 1 < pieces.size(); ++i) seams.push_back({i, outer, i + 1, inner, geometry::identity_map(1)});
  return GluedManifold(pieces, std::move(seams));
}

GluedManifold double_of(const ManifoldModel& s) {
  if (!s.has_boundary()) throw ConstructionError("the double of a closed surface is not defined here");
  std::vector<Seam> seams;
  for (const auto& b : s.boundary) seams.push_back({0, b.name, 1, b.name, geometry::identity_map(1)});
  return GluedManifold({s, s}, std::move(seams));
}

// ---- compatibility -----------------------------------------------------------------

json CompatibilityReport::to_json() const {
  return {{"max_defect", max_defect.to_string(6)},
          {"samples", samples},
          {"compatible", compatible},
          {"worst_seam", worst_seam},
          {"worst_point", worst_point}};
}

IncompatibleMaps::IncompatibleMaps(CompatibilityReport r)
    : PreconditionError("maps are not boundary-compatible: defect " + r.max_defect.to_string(6) + " at " +
                        r.worst_seam + " " + r.worst_point),
      report_(std::move(r)) {}

namespace {

struct BoundaryParam {
  size_t piece;
  std::string comp;
  BigScalar t;
};

/// Boundary component and tangential parameter of a canonical point, if on one.
std::optional<BoundaryParam> boundary_param(const GluedManifold& host, const GluedPoint& p) {
  for (const auto& b : host.piece(p.piece).boundary) {
    const auto c = host.collar(p.piece, b.name);
    auto q = in_collar(p.point, c);
    if (q && q->x[static_cast<size_t>(c.transverse)].is_zero()) {
      return BoundaryParam{p.piece, b.name, q->x[static_cast<size_t>(c.tangential)].big()};
    }
  }
  return std::nullopt;
}

}  // namespace

CompatibilityReport check_compatibility(const std::vector<MapExpr>& maps, const GluedManifold& host, int n_samples,
                                        std::uint64_t seed) {
  if (maps.size() != host.pieces().size()) {
    throw ParameterError("expected " + std::to_string(host.pieces().size()) + " maps, got " +
                         std::to_string(maps.size()));
  }
  numeric::TolerancePolicy tol{numeric::working_precision()};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> t(-3.14159, 3.14159);
  CompatibilityReport rep;
  for (size_t i = 0; i < host.seams().size(); ++i) {
    const Seam& s = host.seams()[i];
    const auto ca = host.collar(s.piece_a, s.comp_a);
    for (int k = 0; k < n_samples; ++k) {
      GluedPoint x{s.piece_a, collar_point(ca, BigScalar(t(rng)), Coord(BigScalar(0)))};
      GluedPoint ax = host.canonicalize(x);  // alpha(x) on the b-side
      GluedPoint lhs, rhs;
      try {
        lhs = host.canonicalize({s.piece_a, geometry::evaluate(maps[s.piece_a], x.point)});
        rhs = host.canonicalize({ax.piece, geometry::evaluate(maps[ax.piece], ax.point)});
      } catch (const std::exception& e) {
        throw DomainError("compatibility sample " + x.to_string() + " failed: " + e.what());
      }
      auto bl = boundary_param(host, lhs);
      auto br = boundary_param(host, rhs);
      if (!bl || !br) throw DomainError("a boundary sample was mapped off the boundary: " + x.to_string());
      BigScalar d = BigScalar::infinity();
      if (bl->piece == br->piece && bl->comp == br->comp) {
        // Chord between the two points on the unit circle of the component's angle.
        const auto c = host.collar(bl->piece, bl->comp);
        const auto& ch = chart(c.chart);
        BigScalar scale = ch.is_periodic(static_cast<size_t>(c.tangential))
                              ? BigScalar::pi() * BigScalar(2) / ch.periods[static_cast<size_t>(c.tangential)]
                              : BigScalar(1);
        d = abs(sin((bl->t - br->t) * scale / BigScalar(2))) * BigScalar(2);
      }
      ++rep.samples;
      if (d > rep.max_defect || rep.samples == 1) {
        rep.max_defect = d;
        rep.worst_seam = host.piece(s.piece_a).id + "/" + s.comp_a;
        rep.worst_point = x.to_string(8);
      }
    }
  }
  rep.compatible = rep.max_defect < tol.path_defect();
  return rep;
}

// ---- GluedMap ----------------------------------------------------------------------

GluedMap::GluedMap(std::vector<MapExpr> maps, GluedManifold host) : maps_(std::move(maps)), host_(std::move(host)) {
  if (maps_.size() != host_.pieces().size()) throw ParameterError("one map per piece is required");
}

GluedPoint GluedMap::operator()(const GluedPoint& p) const {
  if (p.piece >= maps_.size()) throw DomainError("point on a missing piece: " + p.to_string());
  return host_.canonicalize({p.piece, geometry::evaluate(maps_[p.piece], p.point)});
}

GluedMap GluedMap::then_after(const GluedMap& other) const {
  std::vector<MapExpr> m;
  for (size_t i = 0; i < maps_.size(); ++i) m.push_back(geometry::compose(maps_[i], other.maps_.at(i)));
  return GluedMap(std::move(m), host_);
}

GluedMap GluedMap::inverse() const {
  std::vector<MapExpr> m;
  for (const auto& f : maps_) m.push_back(geometry::invert(f));
  return GluedMap(std::move(m), host_);
}

std::vector<Coord> GluedMap::in_seam_chart(size_t seam, const std::vector<Coord>& ts) const {
  GluedPoint img = (*this)(host_.from_seam(seam, ts));
  auto out = host_.to_seam(seam, img);
  if (!out) throw DomainError("image " + img.to_string() + " left the neighbourhood of seam " + std::to_string(seam));
  return *out;
}

json GluedMap::to_json() const {
  json m = json::array();
  for (const auto& f : maps_) m.push_back(geometry::to_json(f));
  return {{"host", glue::to_json(host_)}, {"maps", m}};
}

GluedMap glued_from_json_map(const json& j) {
  std::vector<MapExpr> maps;
  for (const auto& m : j.at("maps")) maps.push_back(geometry::map_from_json(m));
  return GluedMap(std::move(maps), glued_from_json(j.at("host")));
}

GluedMap glue_maps(const std::vector<MapExpr>& maps, const GluedManifold& host, int n_samples) {
  CompatibilityReport rep = check_compatibility(maps, host, n_samples);
  if (!rep.compatible) throw IncompatibleMaps(rep);
  return GluedMap(maps, host);
}

MapExpr piece_psi(const GluedManifold& host, size_t piece, const stretch::ProfilePtr& profile) {
  MapExpr psi = geometry::identity_map(0);
  bool any = false;
  for (const auto& s : host.seams()) {
    for (const auto& [p, c] : {std::make_pair(s.piece_a, s.comp_a), std::make_pair(s.piece_b, s.comp_b)}) {
      if (p != piece) continue;
      MapExpr one = stretch::build_psi(host.collar(p, c), profile);
      psi = any ? geometry::compose(one, psi) : one;
      any = true;
    }
  }
  return psi;
}

GluedMap smooth_glue(const std::vector<MapExpr>& maps, const GluedManifold& host, const stretch::ProfilePtr& profile,
                     int n_samples) {
  CompatibilityReport rep = check_compatibility(maps, host, n_samples);
  if (!rep.compatible) throw IncompatibleMaps(rep);
  std::vector<MapExpr> conj;
  for (size_t i = 0; i < maps.size(); ++i) conj.push_back(stretch::conjugate(maps[i], piece_psi(host, i, profile)));
  return GluedMap(std::move(conj), host);
}

// ---- doubles -------------------------------------------------------------------------

json DoubleReport::to_json() const {
  return {{"topology", topology},
          {"euler_characteristic", euler_characteristic},
          {"homomorphism_defect", homomorphism_defect.to_string(6)},
          {"injective_on_samples", injective_on_samples},
          {"samples", samples}};
}

GluedMap double_map(const ManifoldModel& s, const MapExpr& f, const stretch::ProfilePtr& profile) {
  GluedManifold d = double_of(s);
  // Both copies carry the same collars, so one Psi serves both.
  MapExpr psi = piece_psi(d, 0, profile);
  MapExpr g = stretch::conjugate(f, psi);
  return GluedMap({g, g}, d);
}

DoubleReport check_double(const ManifoldModel& s, const std::vector<MapExpr>& maps, const stretch::ProfilePtr& profile,
                          int samples, std::uint64_t seed) {
  GluedManifold d = double_of(s);
  DoubleReport rep;
  rep.topology = d.topology();
  rep.euler_characteristic = d.euler_characteristic();
  numeric::TolerancePolicy tol{numeric::working_precision()};
  std::mt19937_64 rng(seed);
  std::vector<GluedPoint> pts;
  for (int i = 0; i < samples; ++i) pts.push_back(d.sample(rng));
  rep.samples = samples;

  std::vector<GluedMap> lifted;
  for (const auto& f : maps) lifted.push_back(double_map(s, f, profile));
  for (size_t i = 0; i < maps.size(); ++i) {
    for (size_t j = 0; j < maps.size(); ++j) {
      GluedMap lhs = double_map(s, geometry::compose(maps[i], maps[j]), profile);
      GluedMap rhs = lifted[i].then_after(lifted[j]);
      for (const auto& p : pts) rep.homomorphism_defect = max(rep.homomorphism_defect, d.distance(lhs(p), rhs(p)));
    }
  }

  rep.injective_on_samples = true;
  for (size_t i = 0; i < maps.size(); ++i) {
    for (size_t j = i + 1; j < maps.size(); ++j) {
      bool differ = false, lifts_differ = false;
      for (const auto& p : pts) {
        Point a = geometry::evaluate(maps[i], p.point), b = geometry::evaluate(maps[j], p.point);
        if (geometry::point_distance(a, b) > tol.path_defect()) {
          differ = true;
          lifts_differ = lifts_differ || d.distance(lifted[i](p), lifted[j](p)) > tol.path_defect();
        }
      }
      if (differ && !lifts_differ) rep.injective_on_samples = false;
    }
  }
  return rep;
}

std::vector<GluedPoint> lift_fixed_points(const GluedManifold& d, const std::vector<Point>& fixed) {
  std::vector<GluedPoint> out;
  auto add = [&](GluedPoint g) {
    for (const auto& o : out)
      if (d.distance(o, g) < BigScalar(1e-20)) return;
    out.push_back(std::move(g));
  };
  for (const auto& p : fixed) {
    bool boundary = false;
    for (const auto& b : d.piece(0).boundary) boundary = boundary || b.contains(p);
    add(d.canonicalize({0, p}));
    if (!boundary) add(d.canonicalize({1, p}));
  }
  return out;
}

}  // namespace bglue::glue
