#include "bglue/verify/verify.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "bglue/errors.hpp"
#include "bglue/numeric/finite_difference.hpp"
#include "bglue/numeric/stretch_primitives.hpp"

namespace bglue::verify {

namespace {

std::string sci(const BigScalar& v, int digits = 6) { return v.to_string(digits); }

}  // namespace

json coord_to_json(const Coord& c) {
  if (c.is_log()) return {{"sign", c.log().sign()}, {"logmag", c.log().logmag().to_string(30)}};
  return c.big().to_string(30);
}

json point_to_json(const Point& p) {
  json xs = json::array();
  for (const auto& c : p.x) xs.push_back(coord_to_json(c));
  return {{"chart", p.chart}, {"x", xs}};
}

// ---- parallel map -----------------------------------------------------------------

int worker_count() {
  if (const char* env = std::getenv("BGLUE_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1 && n <= 1024) return static_cast<int>(n);
    throw ParameterError(std::string("BGLUE_THREADS must be an integer in [1, 1024], got '") + env + "'");
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min(static_cast<size_t>(worker_count()), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int bits = numeric::working_precision();
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      numeric::PrecisionScope scope(bits);
      // Static striping keeps the assignment of indices to threads fixed.
      for (size_t i = w; i < n; i += workers) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

// ---- seam smoothness --------------------------------------------------------------

json SeamCheckConfig::to_json() const {
  return {{"max_order", max_order},
          {"directions", directions},
          {"base_step", sci(base_step)},
          {"richardson_levels", richardson_levels},
          {"precision_bits", numeric::working_precision()},
          {"pass_abs", sci(tol.seam_pass_abs)},
          {"pass_rel", sci(tol.seam_rel)},
          {"fail_factor", sci(tol.seam_fail_factor)}};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const OrderResult& SmoothnessReport::order(int k) const {
  for (const auto& o : orders)
    if (o.order == k) return o;
  throw DomainError("report has no order " + std::to_string(k));
}

bool SmoothnessReport::passes_through(int k) const {
  for (int i = 1; i <= k; ++i)
    if (order(i).verdict != Verdict::pass) return false;
  return true;
}

json SmoothnessReport::to_json() const {
  json ords = json::array();
  for (const auto& o : orders) {
    json dirs = json::array();
    for (const auto& d : o.directions) {
      json plus = json::array(), minus = json::array();
      for (const auto& v : d.plus) plus.push_back(sci(v, 12));
      for (const auto& v : d.minus) minus.push_back(sci(v, 12));
      dirs.push_back({{"direction", d.label},
                      {"plus", plus},
                      {"minus", minus},
                      {"mismatch", sci(d.mismatch)},
                      {"err_plus", sci(d.err_plus)},
                      {"err_minus", sci(d.err_minus)}});
    }
    ords.push_back({{"order", o.order},
                    {"mismatch", sci(o.mismatch)},
                    {"err_plus", sci(o.err_plus)},
                    {"err_minus", sci(o.err_minus)},
                    {"scale", sci(o.scale)},
                    {"worst_direction", o.worst_direction},
                    {"verdict", to_string(o.verdict)},
                    {"directions", dirs}});
  }
  return {{"location", location}, {"orders", ords}, {"config", config}};
}

SmoothnessReport check_two_sided(const std::string& location, const TwoSidedFn& f, const BigScalar& t0, int r,
                                 const BigScalar& s_limit, const SeamCheckConfig& cfg) {
  if (r < 1 || r > 6) throw ParameterError("seam check order must be in [1, 6]");
  if (cfg.directions < 1) throw ParameterError("at least one oblique direction is required");
  struct Dir {
    std::string label;
    BigScalar vt, vs;
  };
  std::vector<Dir> dirs;
  for (int j = 0; j < cfg.directions; ++j) {
    BigScalar phi = BigScalar::pi() * (BigScalar(j) + BigScalar("0.5")) / BigScalar(cfg.directions);
    dirs.push_back({"phi=" + phi.to_string(6), cos(phi), sin(phi)});
  }
  dirs.push_back({"transverse", BigScalar(0), BigScalar(1)});

  // results[dir][side][order-1] -> per component
  const size_t nd = dirs.size();
  std::vector<std::vector<std::vector<numeric::FDResult>>> res(nd * 2);
  parallel_for(nd * 2, [&](size_t task) {
    const Dir& d = dirs[task / 2];
    const bool plus = task % 2 == 0;
    auto g = [&](const BigScalar& tau) { return f(t0 + tau * d.vt, tau * d.vs); };
    const BigScalar reach = s_limit / d.vs;
    numeric::Interval dom = plus ? numeric::Interval{BigScalar(0), reach} : numeric::Interval{-reach, BigScalar(0)};
    for (int k = 1; k <= r; ++k) {
      numeric::FDConfig fc;
      fc.order = k;
      fc.base_step = cfg.base_step;
      fc.richardson_levels = cfg.richardson_levels;
      fc.precision_bits = numeric::working_precision();
      fc.stencil = plus ? numeric::Stencil::forward : numeric::Stencil::backward;
      res[task].push_back(numeric::fd_derivative_vec(g, BigScalar(0), fc, dom));
    }
  });

  SmoothnessReport rep;
  rep.location = location;
  rep.config = cfg.to_json();
  for (int k = 1; k <= r; ++k) {
    OrderResult o;
    o.order = k;
    for (size_t di = 0; di < nd; ++di) {
      const auto& p = res[2 * di][static_cast<size_t>(k - 1)];
      const auto& m = res[2 * di + 1][static_cast<size_t>(k - 1)];
      DirectionResult d;
      d.label = dirs[di].label;
      for (size_t c = 0; c < p.size(); ++c) {
        d.plus.push_back(p[c].estimate);
        d.minus.push_back(m[c].estimate);
        d.mismatch = max(d.mismatch, abs(p[c].estimate - m[c].estimate));
        d.err_plus = max(d.err_plus, p[c].err_estimate);
        d.err_minus = max(d.err_minus, m[c].err_estimate);
        o.scale = max(o.scale, max(abs(p[c].estimate), abs(m[c].estimate)));
      }
      if (d.mismatch > o.mismatch || o.worst_direction.empty()) {
        o.mismatch = d.mismatch;
        o.worst_direction = d.label;
      }
      o.err_plus = max(o.err_plus, d.err_plus);
      o.err_minus = max(o.err_minus, d.err_minus);
      o.directions.push_back(std::move(d));
    }
    const BigScalar pass_tol = max(cfg.tol.seam_pass_abs, cfg.tol.seam_rel * o.scale);
    if (o.mismatch < pass_tol && o.err_plus < pass_tol && o.err_minus < pass_tol) {
      o.verdict = Verdict::pass;
    } else if (o.mismatch > pass_tol * cfg.tol.seam_fail_factor) {
      o.verdict = Verdict::fail;
    } else {
      o.verdict = Verdict::inconclusive;
    }
    rep.orders.push_back(std::move(o));
  }
  return rep;
}

SmoothnessReport verify_cr_at_seam(const glue::GluedMap& F, size_t seam, const BigScalar& t0, int r,
                                   const SeamCheckConfig& cfg) {
  const auto& host = F.host();
  if (seam >= host.seams().size()) throw DomainError("no seam " + std::to_string(seam));
  const auto& s = host.seams()[seam];
  const auto ca = host.collar(s.piece_a, s.comp_a);
  const auto cb = host.collar(s.piece_b, s.comp_b);
  const BigScalar limit = min(ca.depth, cb.depth) * BigScalar("0.99");
  const auto& tchart = geometry::chart(cb.chart);
  const BigScalar period = tchart.is_periodic(static_cast<size_t>(cb.tangential))
                               ? tchart.periods[static_cast<size_t>(cb.tangential)]
                               : BigScalar(0);
  const BigScalar ref = F.in_seam_chart(seam, {Coord(t0), Coord(BigScalar(0))})[0].big();
  TwoSidedFn fn = [&](const BigScalar& t, const BigScalar& h) {
    auto out = F.in_seam_chart(seam, {Coord(t), Coord(h)});
    BigScalar tt = out[0].big();
    // Unwrap the tangential output next to its value at the base point.
    if (!period.is_zero() && !(abs(tt - ref) < period / BigScalar(2))) {
      const BigScalar half = period / BigScalar(2);
      tt = ref + (numeric::wrap(tt - ref + half, period) - half);
    }
    return std::vector<BigScalar>{tt, out[1].big()};
  };
  std::string loc = "seam " + std::to_string(seam) + " (" + host.piece(s.piece_a).id + "/" + s.comp_a + " ~ " +
                    host.piece(s.piece_b).id + "/" + s.comp_b + ") t=" + t0.to_string(8);
  return check_two_sided(loc, fn, t0, r, limit, cfg);
}

SmoothnessReport verify_cr_single_chart(const MapExpr& f, const Point& p, int r, const SeamCheckConfig& cfg) {
  if (p.dim() != 2) throw DomainError("single-chart control needs a 2-dimensional chart");
  const Point ref = geometry::evaluate(f, p);
  const BigScalar y0 = p.x[1].big();
  TwoSidedFn fn = [&](const BigScalar& t, const BigScalar& h) {
    Point q = geometry::evaluate(f, geometry::make_point(p.chart, {t, y0 + h}));
    if (q.chart != ref.chart) q = geometry::to_chart(q, ref.chart);
    return q.values();
  };
  return check_two_sided("chart " + p.to_string(8), fn, p.x[0].big(), r, BigScalar("0.5"), cfg);
}

// ---- flatness -----------------------------------------------------------------------

json FlatnessConfig::to_json() const {
  json x = json::array();
  for (const auto& v : xs) x.push_back(sci(v, 12));
  return {{"y_lo", sci(y_lo, 12)}, {"y_hi", sci(y_hi, 12)}, {"points", points}, {"xs", x}, {"phi_power", phi_power}};
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  f.n = static_cast<int>(x.size());
  if (x.size() != y.size() || x.size() < 2) return f;
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (f.slope * x[i] + f.intercept);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / static_cast<double>(x.size()));
  return f;
}

namespace {

json fit_json(const LineFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"rms", f.rms}, {"n", f.n}};
}

}  // namespace

json DecayReport::to_json() const {
  json y = json::array(), gy = json::array(), gx = json::array(), x = json::array();
  for (const auto& v : ys) y.push_back(sci(v, 12));
  for (const auto& v : xs) x.push_back(sci(v, 12));
  for (const auto& row : g_y) {
    json r = json::array();
    for (const auto& v : row) r.push_back(sci(v, 12));
    gy.push_back(r);
  }
  for (const auto& row : g_x) {
    json r = json::array();
    for (const auto& v : row) r.push_back(sci(v, 12));
    gx.push_back(r);
  }
  return {{"y", y},
          {"x", x},
          {"G_y", gy},
          {"G_x", gx},
          {"G_y_zero", g_y_zero},
          {"G_x_zero", g_x_zero},
          {"slope_fit", fit_json(slope_fit)},
          {"constant_fit", fit_json(constant_fit)},
          {"tangential_fit", fit_json(tangential_fit)},
          {"warnings", warnings}};
}

DecayReport measure_flatness(const MapExpr& germ, const FlatnessConfig& cfg) {
  if (cfg.points < 2) throw ParameterError("flatness grid needs at least 2 points");
  if (!(BigScalar(0) < cfg.y_lo && cfg.y_lo < cfg.y_hi)) throw ParameterError("flatness grid needs 0 < y_lo < y_hi");
  MapExpr phik = stretch::stretch_map(std::make_shared<stretch::PhiPower>(cfg.phi_power), 1, 2);
  MapExpr conj = stretch::conjugate(germ, phik);

  DecayReport rep;
  rep.xs = cfg.xs;
  const BigScalar ratio = cfg.y_lo / cfg.y_hi;
  for (int i = 0; i < cfg.points; ++i) {
    rep.ys.push_back(cfg.y_hi * pow(ratio, BigScalar(i) / BigScalar(cfg.points - 1)));
  }
  rep.g_y.assign(cfg.xs.size(), std::vector<BigScalar>(rep.ys.size()));
  rep.g_x.assign(cfg.xs.size(), std::vector<BigScalar>(rep.ys.size()));
  for (size_t xi = 0; xi < cfg.xs.size(); ++xi) {
    const BigScalar& x = cfg.xs[xi];
    const BigScalar gbar = geometry::evaluate(germ, geometry::make_point("R2", {x, BigScalar(0)})).x[0].big();
    parallel_for(rep.ys.size(), [&](size_t yi) {
      Point q = geometry::evaluate(conj, geometry::make_point("R2", {x, rep.ys[yi]}));
      rep.g_y[xi][yi] = q.x[1].big() - rep.ys[yi];
      rep.g_x[xi][yi] = q.x[0].big() - gbar;
    });
  }

  std::vector<double> lx, ly, lc, tx, ty;
  rep.g_y_zero = rep.g_x_zero = true;
  for (size_t xi = 0; xi < rep.xs.size(); ++xi) {
    for (size_t yi = 0; yi < rep.ys.size(); ++yi) {
      const BigScalar& y = rep.ys[yi];
      const BigScalar ly_big = log(y);
      if (!rep.g_y[xi][yi].is_zero()) {
        rep.g_y_zero = false;
        BigScalar lg = log(abs(rep.g_y[xi][yi]));
        lx.push_back(ly_big.to_double());
        ly.push_back(lg.to_double());
        lc.push_back((lg + BigScalar(1) / y - BigScalar(2) * ly_big).to_double());
      }
      if (!rep.g_x[xi][yi].is_zero()) {
        rep.g_x_zero = false;
        tx.push_back(ly_big.to_double());
        ty.push_back(log(abs(rep.g_x[xi][yi])).to_double());
      }
    }
  }
  rep.slope_fit = fit_line(lx, ly);
  if (!lc.empty()) {
    // A constant fit is the mean.
    double mean = 0;
    for (double v : lc) mean += v;
    mean /= static_cast<double>(lc.size());
    double ss = 0;
    for (double v : lc) ss += (v - mean) * (v - mean);
    rep.constant_fit = {0, mean, std::sqrt(ss / static_cast<double>(lc.size())), static_cast<int>(lc.size())};
  }
  rep.tangential_fit = fit_line(tx, ty);
  if (rep.g_y_zero) rep.warnings.push_back("G_y vanishes on the whole grid");
  if (rep.g_x_zero) rep.warnings.push_back("G_x vanishes on the grid at this precision");
  if (!rep.g_y_zero && ly.size() < rep.ys.size() * rep.xs.size()) rep.warnings.push_back("G_y vanishes at some grid points");
  return rep;
}

std::pair<BigScalar, BigScalar> sandwich_bounds(const BigScalar& a, const BigScalar& y) {
  return {numeric::stable_conjugate_linear_offset(a / BigScalar(2), y),
          numeric::stable_conjugate_linear_offset(a * BigScalar(2), y)};
}

MapExpr random_sandwich_germ(const BigScalar& a, std::mt19937_64& rng) {
  // |p2| + |p5| <= 0.9 ln 2 keeps a exp(p2 sin(.) + p5 y / (1 + y)) inside [a/2, 2a].
  std::uniform_real_distribution<double> u(-1, 1), split(0, 1), freq(0.5, 3);
  const double budget = 0.9 * std::log(2.0);
  const double w = split(rng);
  const double p2 = budget * w * (u(rng) < 0 ? -1 : 1);
  const double p5 = budget * (1 - w) * u(rng);
  return geometry::scalar_graph("germ_random", {a, BigScalar(u(rng)), BigScalar(u(rng)), BigScalar(p2),
                                                BigScalar(freq(rng)), BigScalar(3 * u(rng)), BigScalar(p5)});
}

// ---- orbits -------------------------------------------------------------------------

std::string OrbitData::to_csv() const {
  std::ostringstream os;
  size_t dim = 0;
  for (const auto& p : trajectory) dim = std::max(dim, p.dim());
  os << "step,chart";
  for (size_t i = 0; i < dim; ++i) os << ",x" << i;
  os << '\n';
  for (size_t s = 0; s < trajectory.size(); ++s) {
    os << s << ',' << trajectory[s].chart;
    for (const auto& c : trajectory[s].x) os << ',' << c.to_string(20);
    for (size_t i = trajectory[s].dim(); i < dim; ++i) os << ',';
    os << '\n';
  }
  return os.str();
}

json OrbitData::to_json() const {
  return {{"base", point_to_json(base)},
          {"generator", generator},
          {"iterates", iterates},
          {"points", trajectory.size()},
          {"truncated", truncated},
          {"truncation_reason", truncation_reason}};
}

OrbitData orbit(const MapExpr& f, const Point& p, int n, const std::string& label) {
  if (n < 1) throw ParameterError("orbit length must be at least 1");
  OrbitData o;
  o.base = p;
  o.generator = label;
  o.iterates = n;
  o.trajectory.reserve(static_cast<size_t>(n) + 1);
  o.trajectory.push_back(p);
  for (int i = 0; i < n; ++i) {
    try {
      o.trajectory.push_back(geometry::evaluate(f, o.trajectory.back()));
    } catch (const DomainError& e) {
      o.truncated = true;
      o.truncation_reason = "step " + std::to_string(i + 1) + ": " + e.what();
      break;
    }
  }
  return o;
}

json OmegaEstimate::to_json() const {
  return {{"point", point_to_json(point)}, {"residual", sci(residual)}, {"converged", converged}};
}

OmegaEstimate omega_estimate(const OrbitData& o, const BigScalar& tol) {
  if (o.trajectory.empty()) throw DomainError("empty orbit");
  const size_t n = o.trajectory.size();
  const size_t tail = std::max<size_t>(1, n / 10);
  const std::string& ch = o.trajectory.back().chart;
  std::vector<Point> pts;
  for (size_t i = n - tail; i < n; ++i) {
    const Point& p = o.trajectory[i];
    auto q = p.chart == ch ? std::optional<Point>(p) : geometry::try_to_chart(p, ch);
    if (!q) throw DomainError("orbit tail leaves chart " + ch);
    pts.push_back(*q);
  }
  std::vector<BigScalar> mean(pts[0].dim(), BigScalar(0));
  for (const auto& p : pts)
    for (size_t i = 0; i < mean.size(); ++i) mean[i] += p.x[i].big();
  for (auto& v : mean) v /= BigScalar(static_cast<long>(pts.size()));
  if (ch == "S2") {
    BigScalar nrm = geometry::norm2(mean);
    for (auto& v : mean) v /= nrm;
  }
  OmegaEstimate est;
  est.point = geometry::make_point(ch, mean);
  // Twice the largest distance to the mean bounds the tail diameter.
  for (const auto& p : pts) est.residual = max(est.residual, geometry::point_distance(p, est.point));
  est.residual *= BigScalar(2);
  est.converged = est.residual < tol * BigScalar(10);
  return est;
}

json DensityReport::to_json() const {
  json miss = json::array();
  for (const auto& [i, j] : uncovered_sample) miss.push_back({i, j});
  return {{"eps", sci(eps)},
          {"cells_per_axis", cells_per_axis},
          {"cells", cells},
          {"uncovered", uncovered},
          {"dense", dense},
          {"points", points},
          {"length_when_dense", length_when_dense ? json(*length_when_dense) : json(nullptr)},
          {"uncovered_sample", miss}};
}

namespace {

class CellGrid {
 public:
  CellGrid(const std::string& chart_id, const BigScalar& eps) : chart_(&geometry::chart(chart_id)) {
    if (chart_->dim != 2 || !chart_->is_periodic(0) || !chart_->is_periodic(1)) {
      throw DomainError("density check needs a doubly periodic 2-d chart, got " + chart_id);
    }
    if (!(eps > BigScalar(0))) throw ParameterError("eps must be positive");
    n_ = static_cast<int>(std::ceil(std::sqrt(2.0) / eps.to_double()));
    hit_.assign(static_cast<size_t>(n_) * static_cast<size_t>(n_), false);
    remaining_ = hit_.size();
  }

  void add(const Point& p) {
    const Point q = p.chart == chart_->id ? p : geometry::to_chart(p, chart_->id);
    int idx[2];
    for (size_t i = 0; i < 2; ++i) {
      const BigScalar& per = chart_->periods[i];
      double u = (numeric::wrap(q.x[i].big(), per) / per).to_double();
      idx[i] = std::min(n_ - 1, std::max(0, static_cast<int>(std::floor(u * n_))));
    }
    auto slot = hit_.begin() + static_cast<long>(idx[0]) * n_ + idx[1];
    if (!*slot) {
      *slot = true;
      --remaining_;
    }
    ++points_;
  }

  bool full() const { return remaining_ == 0; }

  DensityReport report(const BigScalar& eps) const {
    DensityReport r;
    r.eps = eps;
    r.cells_per_axis = n_;
    r.cells = hit_.size();
    r.uncovered = remaining_;
    r.dense = remaining_ == 0;
    r.points = points_;
    for (int i = 0; i < n_ && r.uncovered_sample.size() < 20; ++i)
      for (int j = 0; j < n_ && r.uncovered_sample.size() < 20; ++j)
        if (!hit_[static_cast<size_t>(i) * static_cast<size_t>(n_) + static_cast<size_t>(j)])
          r.uncovered_sample.emplace_back(i, j);
    return r;
  }

 private:
  const geometry::Chart* chart_;
  int n_ = 0;
  std::vector<bool> hit_;
  size_t remaining_ = 0;
  size_t points_ = 0;
};

}  // namespace

DensityReport density_check(const OrbitData& o, const BigScalar& eps) {
  CellGrid grid(o.base.chart, eps);
  for (const auto& p : o.trajectory) grid.add(p);
  return grid.report(eps);
}

DensityReport word_ball_density(const heisenberg::ActionSpec& spec, const Point& p, const BigScalar& eps, int max_len) {
  using heisenberg::Letter;
  CellGrid grid(p.chart, eps);
  struct Key {
    long a, b, c;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      return std::hash<long>()(k.a) * 1000003u ^ std::hash<long>()(k.b) * 10007u ^ std::hash<long>()(k.c);
    }
  };
  const MapExpr gens[4] = {spec.generator(Letter::X), spec.generator(Letter::Xinv), spec.generator(Letter::Y),
                           spec.generator(Letter::Yinv)};
  std::unordered_set<Key, KeyHash> seen{{0, 0, 0}};
  std::vector<std::pair<Key, Point>> frontier{{{0, 0, 0}, p}}, next;
  grid.add(p);
  std::optional<int> when;
  if (grid.full()) when = 0;
  for (int len = 1; len <= max_len && !when; ++len) {
    next.clear();
    for (const auto& [k, img] : frontier) {
      // Left multiplication: the image of l g is l applied to the image of g.
      const Key nk[4] = {{k.a + 1, k.b, k.c + k.b}, {k.a - 1, k.b, k.c - k.b}, {k.a, k.b + 1, k.c}, {k.a, k.b - 1, k.c}};
      for (int l = 0; l < 4; ++l) {
        if (!seen.insert(nk[l]).second) continue;
        Point q = geometry::evaluate(gens[l], img);
        grid.add(q);
        next.emplace_back(nk[l], std::move(q));
      }
    }
    frontier.swap(next);
    if (grid.full()) when = len;
  }
  DensityReport r = grid.report(eps);
  r.length_when_dense = when;
  return r;
}

// ---- scenes -------------------------------------------------------------------------

stretch::ProfilePtr default_profile() { return stretch::build_chi(BigScalar("0.2"), BigScalar("0.8")); }

glue::GluedMap Scene::element(const heisenberg::HeisElem& g) const {
  std::vector<MapExpr> maps;
  for (size_t i = 0; i < actions.size(); ++i) {
    MapExpr m = actions[i].element(g);
    maps.push_back(smoothed() ? stretch::conjugate(m, psi[i]) : m);
  }
  return glue::GluedMap(std::move(maps), host);
}

glue::GluedMap Scene::generator(heisenberg::Letter l) const {
  std::vector<MapExpr> maps;
  for (size_t i = 0; i < actions.size(); ++i) {
    MapExpr m = actions[i].generator(l);
    maps.push_back(smoothed() ? stretch::conjugate(m, psi[i]) : m);
  }
  return glue::GluedMap(std::move(maps), host);
}

glue::GluedPoint Scene::apply_word(const heisenberg::Word& w, const glue::GluedPoint& p) const {
  glue::GluedMap gens[4] = {generator(heisenberg::Letter::X), generator(heisenberg::Letter::Xinv),
                            generator(heisenberg::Letter::Y), generator(heisenberg::Letter::Yinv)};
  glue::GluedPoint q = p;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) q = gens[static_cast<int>(*it)](q);
  return q;
}

json Scene::to_json() const {
  json acts = json::array();
  for (const auto& a : actions) acts.push_back(a.to_json());
  return {{"name", name},
          {"host", glue::to_json(host)},
          {"actions", acts},
          {"profile", profile ? profile->to_json() : json(nullptr)}};
}

Scene make_scene(std::string name, glue::GluedManifold host, std::vector<heisenberg::ActionSpec> actions,
                 stretch::ProfilePtr profile) {
  if (actions.size() != host.pieces().size())
    throw ConstructionError("scene needs one action per piece (" + std::to_string(host.pieces().size()) + "), got " +
                            std::to_string(actions.size()));
  for (size_t i = 0; i < actions.size(); ++i)
    if (actions[i].model.id != host.piece(i).id)
      throw ConstructionError("action '" + actions[i].target + "' lives on " + actions[i].model.id + ", piece " +
                              std::to_string(i) + " is " + host.piece(i).id);
  Scene s{std::move(name), std::move(host), std::move(actions), std::move(profile), {}};
  if (!s.host.seams().empty()) {
    for (auto g : {heisenberg::HeisElem::X(), heisenberg::HeisElem::Y()}) {
      std::vector<MapExpr> maps;
      for (const auto& a : s.actions) maps.push_back(a.element(g));
      auto rep = glue::check_compatibility(maps, s.host);
      if (!rep.compatible) throw glue::IncompatibleMaps(rep);
    }
  }
  if (s.profile)
    for (size_t i = 0; i < s.actions.size(); ++i) s.psi.push_back(glue::piece_psi(s.host, i, s.profile));
  return s;
}

Scene disk_annulus_scene(stretch::ProfilePtr profile) {
  return make_scene("disk_annulus",
                    glue::glue_pair(geometry::heis_disk_model(), "e+", geometry::heis_annulus_model(), "e+",
                                    geometry::identity_map(1)),
                    {heisenberg::build_action("disk_blowup"), heisenberg::build_action("annulus_blowup")},
                    std::move(profile));
}

Scene single_piece_scene(const heisenberg::ActionSpec& spec) {
  return Scene{spec.target, glue::GluedManifold({spec.model}, {}), {spec}, nullptr, {}};
}

// ---- homomorphism check -----------------------------------------------------------

json HomomorphismReport::to_json() const {
  return {{"words", words}, {"points", points}, {"max_defect", sci(max_defect)}, {"worst_word", worst_word}};
}

HomomorphismReport check_homomorphism(const Scene& scene, int n_words, size_t max_len, int n_points,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<glue::GluedPoint> pts;
  const bool seams = !scene.host.seams().empty();
  std::uniform_real_distribution<double> logs(-3, std::log10(0.3));
  std::uniform_int_distribution<int> sign(0, 1);
  for (int i = 0; i < n_points; ++i) {
    if (seams && i % 5 >= 3) {
      // Two in five points sit in a seam collar at |s| in [1e-3, 0.3].
      BigScalar s = pow(BigScalar(10), BigScalar(logs(rng)));
      pts.push_back(scene.host.sample_near_seam(0, sign(rng) ? s : -s, rng));
    } else {
      pts.push_back(scene.host.sample(rng));
    }
  }
  std::vector<heisenberg::Word> words;
  while (static_cast<int>(words.size()) < n_words) {
    auto w = heisenberg::random_word(rng, max_len);
    if (!w.empty()) words.push_back(std::move(w));
  }
  HomomorphismReport rep;
  rep.words = n_words;
  rep.points = n_points;
  std::vector<BigScalar> worst(words.size());
  parallel_for(words.size(), [&](size_t wi) {
    glue::GluedMap direct = scene.element(heisenberg::evaluate(words[wi]));
    for (const auto& p : pts) worst[wi] = max(worst[wi], scene.host.distance(direct(p), scene.apply_word(words[wi], p)));
  });
  for (size_t wi = 0; wi < words.size(); ++wi) {
    if (worst[wi] > rep.max_defect || rep.worst_word.empty()) {
      rep.max_defect = worst[wi];
      rep.worst_word = words[wi].to_string();
    }
  }
  return rep;
}

}  // namespace bglue::verify
