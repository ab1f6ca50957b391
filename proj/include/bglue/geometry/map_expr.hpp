#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bglue/geometry/chart.hpp"
#include "bglue/numeric/finite_difference.hpp"

namespace bglue::geometry {

using json = nlohmann::json;

class MapNode;
using NodePtr = std::shared_ptr<const MapNode>;

/// One node of a map-expression tree. Nodes are immutable once built.
class MapNode {
 public:
  virtual ~MapNode() = default;

  virtual std::string kind() const = 0;
  /// Short human-readable label used in error messages.
  virtual std::string describe() const { return kind(); }
  /// Number of coordinates; 0 for nodes that accept points of any chart
  /// (manifold models mix 2-coordinate charts with the ambient S2 chart).
  virtual int dim_in() const = 0;
  virtual int dim_out() const = 0;

  /// Value at p. Nodes that do not handle sub-range coordinates themselves
  /// are evaluated through linearized_apply by evaluate().
  virtual Point apply(const Point& p) const = 0;
  virtual bool handles_tiny() const { return false; }
  /// Chart the node converts its input into ("" if it uses the caller's chart).
  virtual std::string home_chart() const { return ""; }

  /// Closed-form inverse; throws UnsupportedError when none is registered.
  virtual NodePtr inverse() const;

  /// Closed-form Jacobian in the coordinates of p's chart, if available.
  virtual std::optional<Matrix> jacobian(const Point& p) const;

  virtual json to_json() const = 0;
};

/// Handle on an expression tree.
class MapExpr {
 public:
  MapExpr() = default;
  explicit MapExpr(NodePtr node) : node_(std::move(node)) {}

  bool empty() const { return !node_; }
  const MapNode& node() const;
  const NodePtr& ptr() const { return node_; }
  std::string kind() const { return node().kind(); }
  int dim_in() const { return node().dim_in(); }
  int dim_out() const { return node().dim_out(); }

  Point operator()(const Point& p) const;

 private:
  NodePtr node_;
};

/// Evaluate f at p. Composition evaluates right to left.
Point evaluate(const MapExpr& f, const Point& p);

// ---- constructors ----------------------------------------------------------

/// dim = 0 gives the identity on points of any chart.
MapExpr identity_map(int dim);
/// Matrix action on the coordinates of `chart` ("" = whatever chart p is in).
MapExpr linear_map(Matrix m, std::string chart = "");
MapExpr translation_map(Vec v, std::string chart = "");
/// Registered closed form (see closed_forms.hpp).
MapExpr scalar_graph(std::string name, Vec params);
/// f x g acting on the first dim_in(f) and remaining coordinates.
MapExpr product(MapExpr f, MapExpr g);
/// f o g.
MapExpr compose(MapExpr f, MapExpr g);
MapExpr invert(const MapExpr& f);
/// Evaluate f on the coordinates of `chart`, returning to the caller's chart
/// when the image lies in it.
MapExpr chart_conjugate(std::string chart, MapExpr f);

struct Region {
  std::string chart;
  int coord = 0;
  BigScalar lo;
  std::optional<BigScalar> hi;  ///< nullopt = unbounded
  bool hi_closed = false;

  bool contains(const Point& q) const;
};

struct PiecewiseBranch {
  Region region;
  MapExpr map;
};

/// First branch whose region contains the point (after moving it to the
/// region's chart); `fallback` elsewhere, or a domain error if empty.
/// The inverse inverts each branch and assumes every branch maps its region
/// onto itself.
MapExpr piecewise(std::vector<PiecewiseBranch> branches, MapExpr fallback = {});

// ---- derivatives -----------------------------------------------------------

/// Chain-rule Jacobian from registered closed forms; nullopt if some node has none.
std::optional<Matrix> jacobian(const MapExpr& f, const Point& p);

/// First partials by fd_derivative along each coordinate of p's chart, output
/// in f(p)'s chart. Periodic output coordinates are unwrapped around f(p).
Matrix jacobian_fd(const MapExpr& f, const Point& p, const numeric::FDConfig& cfg = {});

// ---- serialization ---------------------------------------------------------

json to_json(const MapExpr& f);
MapExpr map_from_json(const json& j);

using NodeParser = std::function<MapExpr(const json&)>;
/// Registers a parser for node kind `kind` (used by the stretch and blowup modules).
void register_node_kind(const std::string& kind, NodeParser parser);

json scalar_to_json(const BigScalar& v);
BigScalar scalar_from_json(const json& j);
json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j);

}  // namespace bglue::geometry
