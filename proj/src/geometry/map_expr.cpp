#include "bglue/geometry/map_expr.hpp"

#include <map>
#include <mutex>

#include "bglue/errors.hpp"
#include "bglue/geometry/closed_forms.hpp"
#include "bglue/geometry/linearize.hpp"

namespace bglue::stretch {
void register_node_kinds();
}
namespace bglue::blowup {
void register_node_kinds();
}

namespace bglue::geometry {

NodePtr MapNode::inverse() const {
  throw UnsupportedError("node '" + describe() + "' has no registered inverse");
}

std::optional<Matrix> MapNode::jacobian(const Point&) const { return std::nullopt; }

const MapNode& MapExpr::node() const {
  if (!node_) throw DomainError("empty map expression");
  return *node_;
}

Point MapExpr::operator()(const Point& p) const { return evaluate(*this, p); }

Point evaluate(const MapExpr& f, const Point& p) {
  const MapNode& n = f.node();
  const bool converts = !n.home_chart().empty() && n.home_chart() != p.chart;
  if (!converts && n.dim_in() > 0 && static_cast<int>(p.dim()) != n.dim_in()) {
    throw DomainError("node '" + n.describe() + "' expects dimension " + std::to_string(n.dim_in()) +
                      ", got point " + p.to_string());
  }
  if (n.handles_tiny() || p.tiny_index(tiny_log2()) < 0) return n.apply(p);
  return linearized_apply([&n](const Point& q) { return n.apply(q); }, p);
}

json scalar_to_json(const BigScalar& v) { return v.to_string(0); }

BigScalar scalar_from_json(const json& j) {
  if (j.is_number()) return BigScalar(j.get<double>());
  if (j.is_string()) return BigScalar(j.get<std::string>());
  throw ParameterError("expected a number or numeric string, got " + j.dump());
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(scalar_to_json(x));
  return a;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw ParameterError("expected an array, got " + j.dump());
  Vec v;
  for (const auto& e : j) v.push_back(scalar_from_json(e));
  return v;
}

namespace {

Point enter_chart(const Point& p, const std::string& chart_id, const MapNode& who) {
  if (chart_id.empty() || p.chart == chart_id) return p;
  auto q = try_to_chart(p, chart_id);
  if (!q) throw DomainError("node '" + who.describe() + "': point " + p.to_string() + " is not in chart '" + chart_id + "'");
  return *q;
}

/// Result back in the caller's chart when it lies there (keeps collar coordinates exact).
Point leave_chart(Point r, const std::string& caller) {
  if (r.chart == caller) return r;
  auto back = try_to_chart(r, caller);
  return back ? *back : r;
}

class IdentityNode final : public MapNode {
 public:
  explicit IdentityNode(int dim) : dim_(dim) {}
  std::string kind() const override { return "identity"; }
  int dim_in() const override { return dim_; }
  int dim_out() const override { return dim_; }
  bool handles_tiny() const override { return true; }
  Point apply(const Point& p) const override { return p; }
  NodePtr inverse() const override { return std::make_shared<IdentityNode>(dim_); }
  std::optional<Matrix> jacobian(const Point& p) const override { return identity_matrix(p.dim()); }
  json to_json() const override { return {{"kind", "identity"}, {"dim", dim_}}; }

 private:
  int dim_;
};

class LinearNode final : public MapNode {
 public:
  LinearNode(Matrix m, std::string chart) : m_(std::move(m)), chart_(std::move(chart)) {
    if (m_.empty() || m_.size() != m_[0].size()) throw DomainError("linear: matrix must be square and non-empty");
  }
  std::string kind() const override { return "linear"; }
  std::string home_chart() const override { return chart_; }
  int dim_in() const override { return static_cast<int>(m_.size()); }
  int dim_out() const override { return dim_in(); }
  Point apply(const Point& p) const override {
    Point q = enter_chart(p, chart_, *this);
    return leave_chart(make_point(q.chart, matvec(m_, q.values())), p.chart);
  }
  NodePtr inverse() const override { return std::make_shared<LinearNode>(inverse_matrix(m_), chart_); }
  std::optional<Matrix> jacobian(const Point& p) const override {
    if (!chart_.empty() && p.chart != chart_) return std::nullopt;
    return m_;
  }
  json to_json() const override {
    json rows = json::array();
    for (const auto& r : m_) rows.push_back(vec_to_json(r));
    return {{"kind", "linear"}, {"matrix", rows}, {"chart", chart_}};
  }

 private:
  Matrix m_;
  std::string chart_;
};

class TranslationNode final : public MapNode {
 public:
  TranslationNode(Vec v, std::string chart) : v_(std::move(v)), chart_(std::move(chart)) {}
  std::string kind() const override { return "translation"; }
  std::string home_chart() const override { return chart_; }
  int dim_in() const override { return static_cast<int>(v_.size()); }
  int dim_out() const override { return dim_in(); }
  Point apply(const Point& p) const override {
    Point q = enter_chart(p, chart_, *this);
    Vec x = q.values();
    for (size_t i = 0; i < x.size(); ++i) x[i] += v_[i];
    return leave_chart(make_point(q.chart, x), p.chart);
  }
  NodePtr inverse() const override {
    Vec n = v_;
    for (auto& x : n) x = -x;
    return std::make_shared<TranslationNode>(n, chart_);
  }
  std::optional<Matrix> jacobian(const Point& p) const override {
    if (!chart_.empty() && p.chart != chart_) return std::nullopt;
    return identity_matrix(v_.size());
  }
  json to_json() const override { return {{"kind", "translation"}, {"vector", vec_to_json(v_)}, {"chart", chart_}}; }

 private:
  Vec v_;
  std::string chart_;
};

class ScalarGraphNode final : public MapNode {
 public:
  ScalarGraphNode(std::string name, Vec params) : form_(&closed_form(name)), params_(std::move(params)) {
    if (params_.size() != form_->n_params) {
      throw ParameterError("closed form '" + form_->name + "' expects " + std::to_string(form_->n_params) +
                           " parameters, got " + std::to_string(params_.size()));
    }
    chart_ = form_->chart(params_);
  }
  std::string kind() const override { return "scalar_graph"; }
  std::string home_chart() const override { return chart_; }
  std::string describe() const override { return "scalar_graph:" + form_->name; }
  int dim_in() const override { return form_->dim; }
  int dim_out() const override { return form_->dim; }
  Point apply(const Point& p) const override {
    Point q = enter_chart(p, chart_, *this);
    return leave_chart(make_point(chart_, form_->eval(params_, q.values())), p.chart);
  }
  NodePtr inverse() const override {
    if (!form_->inverse_params) return MapNode::inverse();
    return std::make_shared<ScalarGraphNode>(form_->name, form_->inverse_params(params_));
  }
  std::optional<Matrix> jacobian(const Point& p) const override {
    if (!form_->jacobian || p.chart != chart_) return std::nullopt;
    return form_->jacobian(params_, p.values());
  }
  json to_json() const override {
    return {{"kind", "scalar_graph"}, {"name", form_->name}, {"params", vec_to_json(params_)}};
  }

 private:
  const ClosedForm* form_;
  Vec params_;
  std::string chart_;
};

std::string euclid_id(int n) { return "R" + std::to_string(n); }

class ProductNode final : public MapNode {
 public:
  ProductNode(MapExpr f, MapExpr g) : f_(std::move(f)), g_(std::move(g)) {
    if (f_.dim_in() != f_.dim_out() || g_.dim_in() != g_.dim_out() || f_.dim_in() <= 0 || g_.dim_in() <= 0) {
      throw DomainError("product: factors must be self-maps of fixed dimension");
    }
  }
  std::string kind() const override { return "product"; }
  int dim_in() const override { return f_.dim_in() + g_.dim_in(); }
  int dim_out() const override { return dim_in(); }
  bool handles_tiny() const override { return true; }
  Point apply(const Point& p) const override {
    const int k = f_.dim_in();
    Point a(euclid_id(k), std::vector<Coord>(p.x.begin(), p.x.begin() + k));
    Point b(euclid_id(g_.dim_in()), std::vector<Coord>(p.x.begin() + k, p.x.end()));
    Point fa = evaluate(f_, a);
    Point gb = evaluate(g_, b);
    std::vector<Coord> x = fa.x;
    x.insert(x.end(), gb.x.begin(), gb.x.end());
    return Point(p.chart, std::move(x));
  }
  NodePtr inverse() const override { return std::make_shared<ProductNode>(invert(f_), invert(g_)); }
  std::optional<Matrix> jacobian(const Point& p) const override {
    const int k = f_.dim_in();
    std::vector<BigScalar> v = p.values();
    auto jf = geometry::jacobian(f_, make_point(euclid_id(k), Vec(v.begin(), v.begin() + k)));
    auto jg = geometry::jacobian(g_, make_point(euclid_id(g_.dim_in()), Vec(v.begin() + k, v.end())));
    if (!jf || !jg) return std::nullopt;
    const size_t n = static_cast<size_t>(dim_in());
    Matrix m(n, Vec(n));
    for (size_t i = 0; i < jf->size(); ++i)
      for (size_t j = 0; j < jf->size(); ++j) m[i][j] = (*jf)[i][j];
    for (size_t i = 0; i < jg->size(); ++i)
      for (size_t j = 0; j < jg->size(); ++j) m[k + i][k + j] = (*jg)[i][j];
    return m;
  }
  json to_json() const override {
    return {{"kind", "product"}, {"left", geometry::to_json(f_)}, {"right", geometry::to_json(g_)}};
  }

 private:
  MapExpr f_, g_;
};

class CompositionNode final : public MapNode {
 public:
  CompositionNode(MapExpr outer, MapExpr inner) : outer_(std::move(outer)), inner_(std::move(inner)) {
    if (outer_.dim_in() > 0 && inner_.dim_out() > 0 && outer_.dim_in() != inner_.dim_out()) {
      throw DomainError("compose: dimension mismatch");
    }
  }
  std::string kind() const override { return "composition"; }
  std::string home_chart() const override { return inner_.node().home_chart(); }
  int dim_in() const override { return inner_.dim_in(); }
  int dim_out() const override { return outer_.dim_out(); }
  bool handles_tiny() const override { return true; }
  Point apply(const Point& p) const override { return evaluate(outer_, evaluate(inner_, p)); }
  NodePtr inverse() const override { return std::make_shared<CompositionNode>(invert(inner_), invert(outer_)); }
  std::optional<Matrix> jacobian(const Point& p) const override {
    auto ji = geometry::jacobian(inner_, p);
    if (!ji) return std::nullopt;
    auto jo = geometry::jacobian(outer_, evaluate(inner_, p));
    if (!jo) return std::nullopt;
    return matmul(*jo, *ji);
  }
  json to_json() const override {
    return {{"kind", "composition"}, {"outer", geometry::to_json(outer_)}, {"inner", geometry::to_json(inner_)}};
  }

 private:
  MapExpr outer_, inner_;
};

class ChartConjugateNode final : public MapNode {
 public:
  ChartConjugateNode(std::string chart, MapExpr f) : chart_(std::move(chart)), f_(std::move(f)) {
    geometry::chart(chart_);  // must exist
  }
  std::string kind() const override { return "chart_conjugate"; }
  std::string describe() const override { return "chart_conjugate:" + chart_; }
  int dim_in() const override { return 0; }
  int dim_out() const override { return 0; }
  bool handles_tiny() const override { return true; }
  Point apply(const Point& p) const override {
    Point q = enter_chart(p, chart_, *this);
    Point r = evaluate(f_, q);
    // Chartless nodes keep the tag; nodes with their own chart are moved back.
    if (r.chart != chart_) {
      auto in = try_to_chart(r, chart_);
      if (!in) throw DomainError("node '" + describe() + "': image " + r.to_string() + " left chart '" + chart_ + "'");
      r = *in;
    }
    if (p.chart == chart_) return r;
    auto back = try_to_chart(r, p.chart);
    return back ? *back : r;
  }
  NodePtr inverse() const override { return std::make_shared<ChartConjugateNode>(chart_, invert(f_)); }
  json to_json() const override {
    return {{"kind", "chart_conjugate"}, {"chart", chart_}, {"map", geometry::to_json(f_)}};
  }

 private:
  std::string chart_;
  MapExpr f_;
};

json region_to_json(const Region& r) {
  json j = {{"chart", r.chart}, {"coord", r.coord}, {"lo", scalar_to_json(r.lo)}};
  j["hi"] = r.hi ? scalar_to_json(*r.hi) : json(nullptr);
  if (r.hi_closed) j["hi_closed"] = true;
  return j;
}

class PiecewiseNode final : public MapNode {
 public:
  PiecewiseNode(std::vector<PiecewiseBranch> branches, MapExpr fallback)
      : branches_(std::move(branches)), fallback_(std::move(fallback)) {
    if (branches_.empty()) throw DomainError("piecewise: no branches");
  }
  std::string kind() const override { return "piecewise"; }
  int dim_in() const override { return dim_; }
  int dim_out() const override { return dim_; }
  bool handles_tiny() const override { return true; }
  Point apply(const Point& p) const override {
    for (const auto& b : branches_) {
      auto q = b.region.chart == p.chart ? std::optional<Point>(p) : try_to_chart(p, b.region.chart);
      if (q && b.region.contains(*q)) return evaluate(b.map, *q);
    }
    if (fallback_.empty()) throw DomainError("node 'piecewise': point " + p.to_string() + " lies in no branch");
    return evaluate(fallback_, p);
  }
  NodePtr inverse() const override {
    std::vector<PiecewiseBranch> inv;
    for (const auto& b : branches_) inv.push_back({b.region, invert(b.map)});
    return std::make_shared<PiecewiseNode>(std::move(inv), fallback_.empty() ? MapExpr() : invert(fallback_));
  }
  json to_json() const override {
    json arr = json::array();
    for (const auto& b : branches_) arr.push_back({{"region", region_to_json(b.region)}, {"map", geometry::to_json(b.map)}});
    json j = {{"kind", "piecewise"}, {"branches", arr}};
    j["default"] = fallback_.empty() ? json(nullptr) : geometry::to_json(fallback_);
    return j;
  }

 private:
  std::vector<PiecewiseBranch> branches_;
  MapExpr fallback_;
  int dim_ = 0;  // branches may act on charts of different dimension
};

struct ParserTable {
  std::mutex mu;
  std::map<std::string, NodeParser> parsers;
};

ParserTable& parsers() {
  static ParserTable t;
  return t;
}

Region region_from_json(const json& j) {
  Region r;
  r.chart = j.at("chart").get<std::string>();
  r.coord = j.at("coord").get<int>();
  r.lo = scalar_from_json(j.at("lo"));
  if (j.contains("hi") && !j.at("hi").is_null()) r.hi = scalar_from_json(j.at("hi"));
  r.hi_closed = j.value("hi_closed", false);
  return r;
}

void register_geometry_kinds() {
  register_node_kind("identity", [](const json& j) { return identity_map(j.at("dim").get<int>()); });
  register_node_kind("linear", [](const json& j) {
    Matrix m;
    for (const auto& row : j.at("matrix")) m.push_back(vec_from_json(row));
    return linear_map(std::move(m), j.value("chart", std::string()));
  });
  register_node_kind("translation", [](const json& j) {
    return translation_map(vec_from_json(j.at("vector")), j.value("chart", std::string()));
  });
  register_node_kind("scalar_graph", [](const json& j) {
    return scalar_graph(j.at("name").get<std::string>(), vec_from_json(j.value("params", json::array())));
  });
  register_node_kind("product", [](const json& j) {
    return product(map_from_json(j.at("left")), map_from_json(j.at("right")));
  });
  register_node_kind("composition", [](const json& j) {
    return compose(map_from_json(j.at("outer")), map_from_json(j.at("inner")));
  });
  register_node_kind("inverse", [](const json& j) { return invert(map_from_json(j.at("of"))); });
  register_node_kind("chart_conjugate", [](const json& j) {
    return chart_conjugate(j.at("chart").get<std::string>(), map_from_json(j.at("map")));
  });
  register_node_kind("piecewise", [](const json& j) {
    std::vector<PiecewiseBranch> b;
    for (const auto& e : j.at("branches")) b.push_back({region_from_json(e.at("region")), map_from_json(e.at("map"))});
    MapExpr fallback;
    if (j.contains("default") && !j.at("default").is_null()) fallback = map_from_json(j.at("default"));
    return piecewise(std::move(b), fallback);
  });
}

void ensure_builtin_kinds() {
  static std::once_flag once;
  std::call_once(once, [] {
    register_geometry_kinds();
    stretch::register_node_kinds();
    blowup::register_node_kinds();
  });
}

}  // namespace

bool Region::contains(const Point& q) const {
  const Coord& c = q.x.at(static_cast<size_t>(coord));
  if (c.compare(lo) < 0) return false;
  if (!hi) return true;
  int cmp = c.compare(*hi);
  return cmp < 0 || (hi_closed && cmp == 0);
}

MapExpr identity_map(int dim) { return MapExpr(std::make_shared<IdentityNode>(dim)); }
MapExpr linear_map(Matrix m, std::string chart) {
  return MapExpr(std::make_shared<LinearNode>(std::move(m), std::move(chart)));
}
MapExpr translation_map(Vec v, std::string chart) {
  return MapExpr(std::make_shared<TranslationNode>(std::move(v), std::move(chart)));
}
MapExpr scalar_graph(std::string name, Vec params) {
  return MapExpr(std::make_shared<ScalarGraphNode>(std::move(name), std::move(params)));
}
MapExpr product(MapExpr f, MapExpr g) { return MapExpr(std::make_shared<ProductNode>(std::move(f), std::move(g))); }
MapExpr compose(MapExpr f, MapExpr g) {
  return MapExpr(std::make_shared<CompositionNode>(std::move(f), std::move(g)));
}
MapExpr invert(const MapExpr& f) { return MapExpr(f.node().inverse()); }
MapExpr chart_conjugate(std::string chart, MapExpr f) {
  return MapExpr(std::make_shared<ChartConjugateNode>(std::move(chart), std::move(f)));
}
MapExpr piecewise(std::vector<PiecewiseBranch> branches, MapExpr fallback) {
  return MapExpr(std::make_shared<PiecewiseNode>(std::move(branches), std::move(fallback)));
}

std::optional<Matrix> jacobian(const MapExpr& f, const Point& p) { return f.node().jacobian(p); }

Matrix jacobian_fd(const MapExpr& f, const Point& p, const numeric::FDConfig& cfg) {
  const Point base = evaluate(f, p);
  const Chart& out_chart = chart(base.chart);
  const Vec base_v = base.values();
  const Vec x0 = p.values();
  Matrix jac(base.dim(), Vec(p.dim()));
  for (size_t j = 0; j < p.dim(); ++j) {
    auto fn = [&](const BigScalar& t) {
      Vec x = x0;
      x[j] = t;
      Point q = evaluate(f, make_point(p.chart, x));
      if (q.chart != base.chart) q = to_chart(q, base.chart);
      Vec d = coordinate_difference(out_chart, q.values(), base_v);
      for (size_t i = 0; i < d.size(); ++i) d[i] += base_v[i];
      return d;
    };
    numeric::FDConfig c = cfg;
    c.order = 1;
    auto col = numeric::fd_derivative_vec(fn, x0[j], c);
    for (size_t i = 0; i < col.size(); ++i) jac[i][j] = col[i].estimate;
  }
  return jac;
}

json to_json(const MapExpr& f) { return f.node().to_json(); }

void register_node_kind(const std::string& kind, NodeParser parser) {
  auto& t = parsers();
  std::lock_guard lock(t.mu);
  t.parsers[kind] = std::move(parser);
}

MapExpr map_from_json(const json& j) {
  ensure_builtin_kinds();
  if (!j.is_object() || !j.contains("kind")) throw ParameterError("map expression must be an object with a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  NodeParser parser;
  {
    auto& t = parsers();
    std::lock_guard lock(t.mu);
    auto it = t.parsers.find(kind);
    if (it == t.parsers.end()) throw ParameterError("unknown map node kind '" + kind + "'");
    parser = it->second;
  }
  try {
    return parser(j);
  } catch (const json::exception& e) {
    throw ParameterError("malformed '" + kind + "' node: " + e.what());
  }
}

}  // namespace bglue::geometry
