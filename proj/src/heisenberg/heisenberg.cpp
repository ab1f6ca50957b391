#include "bglue/heisenberg/heisenberg.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "bglue/blowup/blowup.hpp"
#include "bglue/errors.hpp"
#include "bglue/geometry/closed_forms.hpp"
#include "bglue/numeric/tolerance.hpp"

namespace bglue::heisenberg {

// ---- group law -----------------------------------------------------------------------

std::string HeisElem::to_string() const {
  return "(" + a.str() + "," + b.str() + "," + c.str() + ")";
}

HeisElem mul(const HeisElem& g, const HeisElem& h) { return {g.a + h.a, g.b + h.b, g.c + h.c + g.a * h.b}; }

HeisElem inv(const HeisElem& g) { return {-g.a, -g.b, g.a * g.b - g.c}; }

HeisElem commutator(const HeisElem& g, const HeisElem& h) { return g * h * inv(g) * inv(h); }

HeisElem power(const HeisElem& g, long n) {
  // Square-and-multiply works in any group.
  HeisElem base = n < 0 ? inv(g) : g;
  unsigned long e = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  HeisElem out;
  while (e) {
    if (e & 1UL) out = out * base;
    base = base * base;
    e >>= 1;
  }
  return out;
}

IntMatrix to_matrix(const HeisElem& g) {
  IntMatrix m{};
  m[0] = {1, g.a, g.c};
  m[1] = {0, 1, g.b};
  m[2] = {0, 0, 1};
  return m;
}

IntMatrix matmul(const IntMatrix& p, const IntMatrix& q) {
  IntMatrix r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += p[i][k] * q[k][j];
  return r;
}

// ---- words ---------------------------------------------------------------------------------

namespace {

Letter letter_inverse(Letter l) {
  switch (l) {
    case Letter::X: return Letter::Xinv;
    case Letter::Xinv: return Letter::X;
    case Letter::Y: return Letter::Yinv;
    case Letter::Yinv: return Letter::Y;
  }
  return l;
}

HeisElem letter_elem(Letter l) {
  switch (l) {
    case Letter::X: return HeisElem::X();
    case Letter::Xinv: return inv(HeisElem::X());
    case Letter::Y: return HeisElem::Y();
    case Letter::Yinv: return inv(HeisElem::Y());
  }
  return {};
}

}  // namespace

Word Word::inverse() const {
  Word w;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) w.letters.push_back(letter_inverse(*it));
  return w;
}

std::string Word::to_string() const {
  if (letters.empty()) return "e";
  std::ostringstream os;
  size_t i = 0;
  while (i < letters.size()) {
    const bool is_x = letters[i] == Letter::X || letters[i] == Letter::Xinv;
    long run = 0;
    size_t j = i;
    while (j < letters.size() && letters[j] == letters[i]) ++j;
    run = static_cast<long>(j - i);
    if (letters[i] == Letter::Xinv || letters[i] == Letter::Yinv) run = -run;
    if (i) os << ' ';
    os << (is_x ? 'X' : 'Y');
    if (run != 1) os << '^' << run;
    i = j;
  }
  return os.str();
}

Word Word::parse(const std::string& s) {
  Word w;
  size_t i = 0;
  while (i < s.size()) {
    char ch = s[i];
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '*' || ch == '.') {
      ++i;
      continue;
    }
    if (ch == 'e' && w.letters.empty() && s.find_first_not_of(" e") == std::string::npos) return w;
    Letter l;
    switch (ch) {
      case 'X': l = Letter::X; break;
      case 'x': l = Letter::Xinv; break;
      case 'Y': l = Letter::Y; break;
      case 'y': l = Letter::Yinv; break;
      default: throw ParameterError("bad letter '" + std::string(1, ch) + "' in word \"" + s + "\"");
    }
    ++i;
    long n = 1;
    if (i < s.size() && s[i] == '^') {
      size_t used = 0;
      try {
        n = std::stol(s.substr(i + 1), &used);
      } catch (const std::exception&) {
        throw ParameterError("bad exponent in word \"" + s + "\"");
      }
      i += 1 + used;
    }
    Word run = letter_power(l, n);
    w.letters.insert(w.letters.end(), run.letters.begin(), run.letters.end());
  }
  return w;
}

Word operator*(const Word& u, const Word& v) {
  Word w = u;
  w.letters.insert(w.letters.end(), v.letters.begin(), v.letters.end());
  return w;
}

Word letter_power(Letter l, long n) {
  Word w;
  Letter use = n < 0 ? letter_inverse(l) : l;
  w.letters.assign(static_cast<size_t>(n < 0 ? -n : n), use);
  return w;
}

Word commutator_word(const Word& u, const Word& v) { return u * v * u.inverse() * v.inverse(); }

HeisElem evaluate(const Word& w) {
  HeisElem g;
  for (Letter l : w.letters) g = g * letter_elem(l);
  return g;
}

Word random_word(std::mt19937_64& rng, size_t max_len) {
  std::uniform_int_distribution<size_t> len(0, max_len);
  std::uniform_int_distribution<int> pick(0, 3);
  Word w;
  size_t n = len(rng);
  for (size_t i = 0; i < n; ++i) w.letters.push_back(static_cast<Letter>(pick(rng)));
  return w;
}

// ---- Cayley ball -------------------------------------------------------------------------

// Dense byte table over |a|, |b| <= r, |c| <= r^2; every element of length
// <= r lies inside because each Y step moves c by |a| <= r.
struct CayleyBall::Table {
  long r = 0, cmax = 0, side = 0, cside = 0;
  std::vector<std::uint8_t> dist;  // 255 = not reached

  static size_t cells(long r) {
    const long side = 2 * r + 1, cside = 2 * r * r + 1;
    return static_cast<size_t>(side) * static_cast<size_t>(side) * static_cast<size_t>(cside);
  }
  size_t index(long a, long b, long c) const {
    return (static_cast<size_t>(a + r) * static_cast<size_t>(side) + static_cast<size_t>(b + r)) *
               static_cast<size_t>(cside) +
           static_cast<size_t>(c + cmax);
  }
  bool inside(long a, long b, long c) const { return std::labs(a) <= r && std::labs(b) <= r && std::labs(c) <= cmax; }
};

CayleyBall::CayleyBall(int radius, size_t max_states) : radius_(radius) {
  if (radius < 0 || radius > 250) throw ParameterError("BFS radius must be in [0, 250]");
  if (Table::cells(radius) > max_states) {
    long fits = 0;
    while (Table::cells(fits + 1) <= max_states) ++fits;
    throw ResourceError("Cayley ball of radius " + std::to_string(radius) + " needs " +
                            std::to_string(Table::cells(radius)) + " table cells; the budget of " +
                            std::to_string(max_states) + " allows radius " + std::to_string(fits),
                        fits);
  }
  auto t = std::make_shared<Table>();
  t->r = radius;
  t->cmax = static_cast<long>(radius) * radius;
  t->side = 2 * t->r + 1;
  t->cside = 2 * t->cmax + 1;
  t->dist.assign(Table::cells(radius), 255);

  struct Node {
    long a, b, c;
  };
  std::vector<Node> frontier{{0, 0, 0}}, next;
  t->dist[t->index(0, 0, 0)] = 0;
  sphere_sizes_.push_back(1);
  for (int d = 1; d <= radius; ++d) {
    next.clear();
    for (const Node& n : frontier) {
      // Right multiplication by X^+-1 and Y^+-1.
      const Node nbrs[4] = {{n.a + 1, n.b, n.c}, {n.a - 1, n.b, n.c}, {n.a, n.b + 1, n.c + n.a}, {n.a, n.b - 1, n.c - n.a}};
      for (const Node& m : nbrs) {
        auto& slot = t->dist[t->index(m.a, m.b, m.c)];
        if (slot != 255) continue;
        slot = static_cast<std::uint8_t>(d);
        next.push_back(m);
      }
    }
    sphere_sizes_.push_back(next.size());
    frontier.swap(next);
  }
  table_ = std::move(t);
}

size_t CayleyBall::size() const {
  size_t n = 0;
  for (size_t s : sphere_sizes_) n += s;
  return n;
}

std::optional<int> CayleyBall::length(const HeisElem& g) const {
  const Table& t = *table_;
  if (abs(g.a) > t.r || abs(g.b) > t.r || abs(g.c) > t.cmax) return std::nullopt;
  long a = g.a.convert_to<long>(), b = g.b.convert_to<long>(), c = g.c.convert_to<long>();
  std::uint8_t d = t.dist[t.index(a, b, c)];
  if (d == 255) return std::nullopt;
  return d;
}

void CayleyBall::for_each(const std::function<void(const HeisElem&, int)>& fn) const {
  const Table& t = *table_;
  for (long a = -t.r; a <= t.r; ++a)
    for (long b = -t.r; b <= t.r; ++b)
      for (long c = -t.cmax; c <= t.cmax; ++c) {
        std::uint8_t d = t.dist[t.index(a, b, c)];
        if (d != 255) fn(HeisElem{a, b, c}, d);
      }
}

std::optional<int> word_length(const HeisElem& g, int radius, size_t max_states) {
  return CayleyBall(radius, max_states).length(g);
}

std::optional<int> exhaustive_length(const HeisElem& g, int radius) {
  if (radius > 10) throw ParameterError("exhaustive enumeration is limited to radius 10");
  const long ga = g.a.convert_to<long>(), gb = g.b.convert_to<long>(), gc = g.c.convert_to<long>();
  std::optional<int> best;
  // Depth-first over all words; (a, b, c) updated by right multiplication.
  std::function<void(long, long, long, int)> walk = [&](long a, long b, long c, int depth) {
    if (a == ga && b == gb && c == gc && (!best || depth < *best)) best = depth;
    if (depth == radius) return;
    walk(a + 1, b, c, depth + 1);
    walk(a - 1, b, c, depth + 1);
    walk(a, b + 1, c + a, depth + 1);
    walk(a, b - 1, c - a, depth + 1);
  };
  if (abs(g.a) > radius || abs(g.b) > radius || abs(g.c) > static_cast<long>(radius) * radius) return std::nullopt;
  walk(0, 0, 0, 0);
  return best;
}

// ---- distortion --------------------------------------------------------------------------

Word witness_word(long m) {
  if (m == 0) return {};
  if (m < 0) return witness_word(-m).inverse();
  long best_len = -1, best_a = 1;
  for (long a = 1; a <= m; ++a) {
    long b = m / a, r = m % a;
    long len = 2 * a + 2 * b + (r ? 2 * r + 2 : 0);
    if (best_len < 0 || len < best_len) {
      best_len = len;
      best_a = a;
    }
    if (2 * a > best_len) break;
  }
  const long a = best_a, b = m / a, r = m % a;
  Word w = commutator_word(letter_power(Letter::X, a), letter_power(Letter::Y, b));
  if (r) w = w * commutator_word(letter_power(Letter::X, r), letter_power(Letter::Y, 1));
  return w;
}

double DistortionProfile::min_ratio_upto(long m) const {
  double best = INFINITY;
  for (const auto& row : rows) {
    if (row.m > m) break;
    best = std::min(best, row.ratio);
  }
  return best;
}

std::string DistortionProfile::to_csv() const {
  std::ostringstream os;
  os << "m,length,ratio,witness_word\n";
  os.precision(10);
  for (const auto& r : rows) os << r.m << ',' << r.length << ',' << r.ratio << ',' << r.witness << '\n';
  return os.str();
}

json DistortionProfile::to_json() const {
  json rows_j = json::array();
  for (const auto& r : rows) {
    rows_j.push_back({{"m", r.m}, {"length", r.length}, {"exact", r.exact}, {"ratio", r.ratio}, {"witness_word", r.witness}});
  }
  return {{"radius", radius},
          {"ball_size", ball_size},
          {"square_bound_holds", square_bound_holds},
          {"min_ratio_nonincreasing", min_ratio_nonincreasing},
          {"rows", rows_j}};
}

DistortionProfile distortion_profile(int n_max, int radius, size_t max_states) {
  if (n_max < 1) throw ParameterError("n_max must be positive");
  CayleyBall ball(radius, max_states);
  DistortionProfile prof;
  prof.radius = radius;
  prof.ball_size = ball.size();
  const long m_max = static_cast<long>(n_max) * n_max;
  for (long m = 1; m <= m_max; ++m) {
    DistortionRow row;
    row.m = m;
    Word w = witness_word(m);
    if (!(evaluate(w) == power(HeisElem::Z(), m))) {
      throw ConstructionError("witness for Z^" + std::to_string(m) + " evaluates to " + evaluate(w).to_string());
    }
    row.witness = w.to_string();
    if (auto exact = ball.length(power(HeisElem::Z(), m))) {
      row.length = *exact;
      row.exact = true;
      if (static_cast<size_t>(row.length) > w.size()) throw ConstructionError("BFS length exceeds a witness");
    } else {
      row.length = static_cast<long>(w.size());
    }
    row.ratio = static_cast<double>(row.length) / static_cast<double>(m);
    prof.rows.push_back(std::move(row));
  }
  prof.square_bound_holds = true;
  for (long n = 1; n <= n_max; ++n) {
    Word w = commutator_word(letter_power(Letter::X, n), letter_power(Letter::Y, n));
    bool ok = evaluate(w) == power(HeisElem::Z(), n * n) && static_cast<long>(w.size()) == 4 * n &&
              prof.rows[static_cast<size_t>(n * n - 1)].length <= 4 * n;
    prof.square_bound_holds = prof.square_bound_holds && ok;
  }
  prof.min_ratio_nonincreasing = true;
  double running = INFINITY;
  for (const auto& r : prof.rows) {
    double next = std::min(running, r.ratio);
    if (next > running) prof.min_ratio_nonincreasing = false;
    running = next;
  }
  return prof;
}

// ---- actions -----------------------------------------------------------------------------

namespace {

BigScalar to_big(const Int& v) { return BigScalar(v.str()); }

bool quotient_target(const std::string& t) { return t == "torus" || t == "cylinder" || t == "calegari_sphere"; }

}  // namespace

const std::vector<std::string>& action_targets() {
  static const std::vector<std::string> t{"sphere", "plane", "torus", "cylinder", "calegari_sphere", "disk_blowup",
                                          "annulus_blowup"};
  return t;
}

bool near_rational(const BigScalar& alpha, long max_den, double tol) {
  // alpha q within tol q of an integer; long double keeps ~19 digits, ample at q <= 1e6.
  const long double a = static_cast<long double>(alpha.to_double());
  const long double frac = static_cast<long double>((alpha - BigScalar(alpha.to_double())).to_double());
  for (long q = 1; q <= max_den; ++q) {
    long double x = a * q + frac * q;
    if (std::fabs(x - std::round(x)) < static_cast<long double>(tol) * q) return true;
  }
  return false;
}

MapExpr ActionSpec::element(const HeisElem& g) const {
  const BigScalar a = to_big(g.a), b = to_big(g.b), c = to_big(g.c);
  using geometry::scalar_graph;
  if (target == "trivial") return geometry::identity_map(0);
  if (target == "sphere") return scalar_graph("sphere_projective", {a, b, c});
  if (target == "plane") return scalar_graph("heis_plane", {a, b, c});
  if (target == "torus") return scalar_graph("heis_torus", {alpha, a, b, c});
  if (target == "cylinder") return scalar_graph("heis_cylinder", {alpha, a, b, c});
  if (target == "calegari_sphere") return scalar_graph("heis_calegari", {alpha, a, b, c});
  MapExpr s = scalar_graph("sphere_projective", {a, b, c});
  if (target == "disk_blowup") return blowup::induced_map(s, blowup::sphere_site(1));
  if (target == "annulus_blowup") return blowup::induced_map(s, {blowup::sphere_site(1), blowup::sphere_site(-1)});
  throw ParameterError("unknown action target '" + target + "'");
}

ActionSpec trivial_action(const geometry::ManifoldModel& model) {
  return ActionSpec{"trivial", BigScalar(0), model, geometry::identity_map(0), geometry::identity_map(0), true};
}

MapExpr ActionSpec::generator(Letter l) const {
  switch (l) {
    case Letter::X: return X;
    case Letter::Y: return Y;
    default: return element(letter_elem(l));
  }
}

json ActionSpec::to_json() const {
  return {{"target", target},
          {"alpha", geometry::scalar_to_json(alpha)},
          {"model", model.id},
          {"smooth", smooth},
          {"X", geometry::to_json(X)},
          {"Y", geometry::to_json(Y)}};
}

ActionSpec build_action(const std::string& target, const BigScalar& alpha) {
  ActionSpec s;
  s.target = target;
  if (quotient_target(target)) {
    s.alpha = alpha.is_zero() ? sqrt(BigScalar(2)) - BigScalar(1) : alpha;
    if (!(s.alpha > BigScalar(0))) throw ParameterError("alpha must be positive, got " + s.alpha.to_string(12));
    if (near_rational(s.alpha)) {
      throw ParameterError("alpha = " + s.alpha.to_string(16) +
                           " is within 1e-12 of a rational with denominator <= 1e6; the quotient action needs an "
                           "irrational period");
    }
  }
  if (target == "sphere") {
    s.model = geometry::sphere_model();
  } else if (target == "plane") {
    s.model = geometry::plane_model();
  } else if (target == "torus") {
    s.model = geometry::torus_model(s.alpha);
  } else if (target == "cylinder") {
    s.model = geometry::cylinder_model(s.alpha);
  } else if (target == "calegari_sphere") {
    s.model = geometry::calegari_model(s.alpha);
    s.smooth = false;
  } else if (target == "disk_blowup") {
    s.model = geometry::heis_disk_model();
  } else if (target == "annulus_blowup") {
    s.model = geometry::heis_annulus_model();
  } else {
    throw ParameterError("unknown action target '" + target + "'");
  }
  s.X = s.element(HeisElem::X());
  s.Y = s.element(HeisElem::Y());
  RelationReport rel = check_relations(s, 6, 1);
  if (!rel.ok) throw ConstructionError("action '" + target + "' fails its relations: " + rel.to_json().dump());
  return s;
}

MapExpr word_map(const ActionSpec& spec, const Word& w) {
  if (w.empty()) return geometry::identity_map(0);
  MapExpr out = spec.generator(w.letters.back());
  for (auto it = w.letters.rbegin() + 1; it != w.letters.rend(); ++it) out = geometry::compose(spec.generator(*it), out);
  return out;
}

Point evaluate_word_action(const ActionSpec& spec, const Word& w, const Point& p) {
  Point q = p;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) q = geometry::evaluate(spec.generator(*it), q);
  return q;
}

json RelationReport::to_json() const {
  return {{"xz_defect", xz_defect.to_string(6)},
          {"yz_defect", yz_defect.to_string(6)},
          {"element_defect", element_defect.to_string(6)},
          {"samples", samples},
          {"ok", ok}};
}

RelationReport check_relations(const ActionSpec& spec, int samples, std::uint64_t seed) {
  using geometry::evaluate;
  using geometry::point_distance;
  std::mt19937_64 rng(seed);
  const MapExpr z = spec.element(HeisElem::Z());
  RelationReport rep;
  for (int i = 0; i < samples; ++i) {
    Point p = spec.model.sample_interior(rng);
    rep.xz_defect = max(rep.xz_defect, point_distance(evaluate(z, evaluate(spec.X, p)), evaluate(spec.X, evaluate(z, p))));
    rep.yz_defect = max(rep.yz_defect, point_distance(evaluate(z, evaluate(spec.Y, p)), evaluate(spec.Y, evaluate(z, p))));
    Word w = random_word(rng, 6);
    Point by_word = evaluate_word_action(spec, w, p);
    Point by_elem = evaluate(spec.element(evaluate(w)), p);
    rep.element_defect = max(rep.element_defect, point_distance(by_word, by_elem));
    ++rep.samples;
  }
  numeric::TolerancePolicy tol{numeric::working_precision()};
  rep.ok = rep.xz_defect < tol.path_defect() && rep.yz_defect < tol.path_defect() &&
           rep.element_defect < tol.path_defect();
  return rep;
}

}  // namespace bglue::heisenberg
