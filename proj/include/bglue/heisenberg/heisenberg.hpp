#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bglue/geometry/manifold.hpp"

namespace bglue::heisenberg {

using Int = boost::multiprecision::cpp_int;
using geometry::json;
using geometry::MapExpr;
using geometry::Point;
using numeric::BigScalar;

/// (a, b, c) <-> [[1, a, c], [0, 1, b], [0, 0, 1]].
struct HeisElem {
  Int a, b, c;

  static HeisElem identity() { return {}; }
  static HeisElem X() { return {1, 0, 0}; }
  static HeisElem Y() { return {0, 1, 0}; }
  static HeisElem Z() { return {0, 0, 1}; }

  bool operator==(const HeisElem&) const = default;
  std::string to_string() const;
};

HeisElem mul(const HeisElem& g, const HeisElem& h);
HeisElem inv(const HeisElem& g);
/// [g, h] = g h g^-1 h^-1.
HeisElem commutator(const HeisElem& g, const HeisElem& h);
HeisElem power(const HeisElem& g, long n);
inline HeisElem operator*(const HeisElem& g, const HeisElem& h) { return mul(g, h); }

/// Exact 3x3 integer matrix product, kept for cross-checking the tuple law.
using IntMatrix = std::array<std::array<Int, 3>, 3>;
IntMatrix to_matrix(const HeisElem& g);
IntMatrix matmul(const IntMatrix& p, const IntMatrix& q);

enum class Letter : std::uint8_t { X, Xinv, Y, Yinv };

struct Word {
  std::vector<Letter> letters;

  size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  /// Reverse order, each letter inverted.
  Word inverse() const;
  /// Runs collapsed to powers: "X^2 Y X^-2 Y^-1"; "e" for the empty word.
  std::string to_string() const;
  /// Accepts the to_string form and plain letters ("XYxy", lower case = inverse).
  static Word parse(const std::string& s);

  bool operator==(const Word&) const = default;
};

Word operator*(const Word& u, const Word& v);
Word letter_power(Letter l, long n);
Word commutator_word(const Word& u, const Word& v);
HeisElem evaluate(const Word& w);
Word random_word(std::mt19937_64& rng, size_t max_len);

// ---- word metric ------------------------------------------------------------------

/// Exact Cayley ball of {X^+-1, Y^+-1} around the identity, built by layered BFS.
class CayleyBall {
 public:
  /// ResourceError (partial = radius completed) when the ball would exceed max_states.
  explicit CayleyBall(int radius, size_t max_states = kDefaultMaxStates);

  /// Budget on dense table cells (one byte each).
  static constexpr size_t kDefaultMaxStates = 1'500'000'000;

  int radius() const { return radius_; }
  size_t size() const;
  /// Number of elements at exact distance r.
  const std::vector<size_t>& sphere_sizes() const { return sphere_sizes_; }
  /// Exact length if g is in the ball.
  std::optional<int> length(const HeisElem& g) const;
  /// Calls fn(elem, length) for every element.
  void for_each(const std::function<void(const HeisElem&, int)>& fn) const;

 private:
  int radius_;
  std::vector<size_t> sphere_sizes_;
  struct Table;
  std::shared_ptr<const Table> table_;
};

/// BFS length of g, or nullopt when |g| > radius.
std::optional<int> word_length(const HeisElem& g, int radius, size_t max_states = CayleyBall::kDefaultMaxStates);

/// Shortest length by trying every word of length <= radius (4^r words).
std::optional<int> exhaustive_length(const HeisElem& g, int radius);

// ---- distortion ----------------------------------------------------------------------

/// Shortest product of commutators [X^a, Y^b] [X^r, Y] spelling Z^m.
Word witness_word(long m);

struct DistortionRow {
  long m = 0;
  long length = 0;     ///< exact BFS length when `exact`, else the witness length
  bool exact = false;
  double ratio = 0;    ///< length / m
  std::string witness;
};

struct DistortionProfile {
  std::vector<DistortionRow> rows;  ///< m = 1 .. n_max^2
  int radius = 0;
  size_t ball_size = 0;
  bool square_bound_holds = false;  ///< |Z^{n^2}| <= 4n for all n <= n_max, witnesses checked exactly
  bool min_ratio_nonincreasing = false;

  /// Smallest ratio over rows with m' <= m.
  double min_ratio_upto(long m) const;
  std::string to_csv() const;
  json to_json() const;
};

DistortionProfile distortion_profile(int n_max, int radius, size_t max_states = CayleyBall::kDefaultMaxStates);

// ---- actions ---------------------------------------------------------------------------

/// A concrete action of H: generator images and, where available, a closed
/// form for an arbitrary element.
struct ActionSpec {
  std::string target;  ///< sphere, plane, torus, cylinder, calegari_sphere, disk_blowup, annulus_blowup
  BigScalar alpha;     ///< quotient period, 0 when unused
  geometry::ManifoldModel model;
  MapExpr X, Y;
  bool smooth = true;  ///< false for the C^0 sphere

  /// Closed form of the element (a, b, c).
  MapExpr element(const HeisElem& g) const;
  MapExpr generator(Letter l) const;
  json to_json() const;
};

const std::vector<std::string>& action_targets();

/// DomainError-free precheck: true when alpha is within 1e-12 of p/q for some q <= 1e6.
bool near_rational(const BigScalar& alpha, long max_den = 1'000'000, double tol = 1e-12);

/// ParameterError for unknown targets or (near-)rational alpha on quotient targets.
ActionSpec build_action(const std::string& target, const BigScalar& alpha = BigScalar(0));

/// Every element acts as the identity on `model` (target "trivial").
ActionSpec trivial_action(const geometry::ManifoldModel& model);

/// Generator images composed along w; the rightmost letter acts first.
MapExpr word_map(const ActionSpec& spec, const Word& w);
Point evaluate_word_action(const ActionSpec& spec, const Word& w, const Point& p);

struct RelationReport {
  BigScalar xz_defect, yz_defect;  ///< |ZX p - XZ p|, |ZY p - YZ p|
  BigScalar element_defect;        ///< word map vs closed-form element
  int samples = 0;
  bool ok = false;
  json to_json() const;
};

RelationReport check_relations(const ActionSpec& spec, int samples, std::uint64_t seed);

}  // namespace bglue::heisenberg
