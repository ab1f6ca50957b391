#include <doctest.h>

#include <chrono>
#include <map>
#include <random>

#include "bglue/errors.hpp"
#include "bglue/heisenberg/heisenberg.hpp"
#include "bglue/numeric/tolerance.hpp"

using namespace bglue::heisenberg;
using bglue::geometry::make_point;
using bglue::numeric::TolerancePolicy;

namespace {

HeisElem elem(long a, long b, long c) { return {a, b, c}; }

}  // namespace

TEST_CASE("group law examples") {
  CHECK(HeisElem::X() * HeisElem::Y() == elem(1, 1, 1));
  CHECK(commutator(HeisElem::X(), HeisElem::Y()) == HeisElem::Z());
  CHECK(commutator(power(HeisElem::X(), 2), power(HeisElem::Y(), 2)) == elem(0, 0, 4));
  CHECK(inv(elem(2, 3, 5)) == elem(-2, -3, 1));
  CHECK(elem(2, 3, 5) * inv(elem(2, 3, 5)) == HeisElem::identity());
  CHECK(power(HeisElem::Z(), -7) == elem(0, 0, -7));
}

TEST_CASE("tuple law agrees with matrix multiplication on 10^4 pairs") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<long> d(-1000000, 1000000);
  for (int i = 0; i < 10000; ++i) {
    HeisElem g = elem(d(rng), d(rng), d(rng)), h = elem(d(rng), d(rng), d(rng));
    REQUIRE(to_matrix(g * h) == matmul(to_matrix(g), to_matrix(h)));
  }
  // Big integers stay exact.
  HeisElem big = power(elem(1, 1, 0), 1000000);
  CHECK(big.c == Int(1000000) * Int(999999) / 2);
}

TEST_CASE("central relations") {
  const HeisElem x = HeisElem::X(), y = HeisElem::Y(), z = HeisElem::Z();
  CHECK(x * z == z * x);
  CHECK(y * z == z * y);
  for (long n = 1; n <= 64; ++n) CHECK(commutator(power(x, n), power(y, n)) == power(z, n * n));
}

TEST_CASE("words") {
  Word w = Word::parse("XYxy");
  CHECK(evaluate(w) == HeisElem::Z());
  CHECK(w.to_string() == "X Y X^-1 Y^-1");
  CHECK(Word::parse(w.to_string()) == w);
  CHECK(Word::parse("X^3 Y^-2").size() == 5);
  CHECK(Word::parse("e").empty());
  CHECK_THROWS_AS(Word::parse("XQ"), bglue::ParameterError);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    Word u = random_word(rng, 12);
    CHECK(evaluate(u * u.inverse()) == HeisElem::identity());
  }
}

TEST_CASE("BFS word lengths") {
  CHECK(word_length(HeisElem::identity(), 4) == 0);
  CHECK(word_length(HeisElem::Z(), 4) == 4);
  CHECK(word_length(HeisElem::Z(), 3) == std::nullopt);
  auto z4 = word_length(power(HeisElem::Z(), 4), 8);
  REQUIRE(z4.has_value());
  CHECK(*z4 <= 8);
  CHECK(word_length(HeisElem::X() * HeisElem::Y(), 4) == 2);
}

TEST_CASE("BFS agrees with exhaustive enumeration on the radius-6 ball") {
  CayleyBall ball(6);
  size_t checked = 0;
  ball.for_each([&](const HeisElem& g, int len) {
    REQUIRE(exhaustive_length(g, 6) == len);
    ++checked;
  });
  CHECK(checked == ball.size());
  size_t total = 0;
  for (size_t s : ball.sphere_sizes()) total += s;
  CHECK(total == checked);
  CHECK(ball.sphere_sizes()[1] == 4);
}

TEST_CASE("BFS budget") {
  try {
    CayleyBall big(40, 1000000);
    FAIL("expected ResourceError");
  } catch (const bglue::ResourceError& e) {
    CHECK(e.partial() > 0);
    CHECK(e.partial() < 40);
  }
}

TEST_CASE("distortion profile") {
  auto start = std::chrono::steady_clock::now();
  DistortionProfile p = distortion_profile(64, 14);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 60);
  REQUIRE(p.rows.size() == 4096);
  CHECK(p.rows[0].length == 4);
  CHECK(p.rows[0].exact);
  CHECK(p.rows[3].length <= 8);
  CHECK(p.square_bound_holds);
  CHECK(p.min_ratio_nonincreasing);
  CHECK(p.min_ratio_upto(144) <= 1.0 / 3.0 + 1e-15);
  for (long n = 1; n <= 64; ++n) CHECK(p.rows[static_cast<size_t>(n * n - 1)].length <= 4 * n);
  std::string csv = p.to_csv();
  CHECK(csv.rfind("m,length,ratio,witness_word\n", 0) == 0);
  for (long m : {1L, 7L, 50L, 1000L}) CHECK(evaluate(witness_word(m)) == power(HeisElem::Z(), m));
}

TEST_CASE("irrationality precheck") {
  CHECK(near_rational(BigScalar(1) / BigScalar(3)));
  CHECK(near_rational(BigScalar("0.5")));
  CHECK_FALSE(near_rational(sqrt(BigScalar(2)) - BigScalar(1)));
  CHECK_THROWS_AS(build_action("torus", BigScalar("0.25")), bglue::ParameterError);
  CHECK_THROWS_AS(build_action("klein_bottle"), bglue::ParameterError);
}

TEST_CASE("sphere action examples") {
  ActionSpec s = build_action("sphere");
  auto q = bglue::geometry::evaluate(s.X, make_point("S2", {BigScalar(0), BigScalar(1), BigScalar(0)}));
  BigScalar r = BigScalar(1) / sqrt(BigScalar(2));
  CHECK(abs(q.x[0].big() - r) < BigScalar(1e-70));
  CHECK(abs(q.x[1].big() - r) < BigScalar(1e-70));
  CHECK(q.x[2].big() == BigScalar(0));
  for (int sign : {1, -1}) {
    auto p = make_point("S2", {BigScalar(sign), BigScalar(0), BigScalar(0)});
    for (const char* w : {"X", "Y", "XYxy"}) {
      CHECK(bglue::geometry::point_distance(evaluate_word_action(s, Word::parse(w), p), p) == BigScalar(0));
    }
  }
}

TEST_CASE("plane action examples") {
  ActionSpec s = build_action("plane");
  auto q = bglue::geometry::evaluate(s.X, make_point("R2", {BigScalar(2), BigScalar(3)}));
  CHECK(q.x[0].big() == BigScalar(5));
  CHECK(q.x[1].big() == BigScalar(3));
  auto h = evaluate_word_action(s, Word::parse("XYxy"), make_point("R2", {BigScalar("0.5"), BigScalar(-4)}));
  CHECK(h.x[0].big() == BigScalar("1.5"));
  CHECK(h.x[1].big() == BigScalar(-4));
  auto p = make_point("R2", {BigScalar("0.1"), BigScalar("0.2")});
  CHECK(bglue::geometry::point_distance(evaluate_word_action(s, Word{}, p), p) == BigScalar(0));
}

TEST_CASE("the commutator on the torus is a horizontal translation") {
  ActionSpec s = build_action("torus");
  const BigScalar alpha = s.alpha;
  auto p = make_point(s.model.fallback_chart, {BigScalar("0.1"), BigScalar("0.3")});
  auto q = evaluate_word_action(s, Word::parse("XYxy"), p);
  CHECK(abs(q.x[1].big() - BigScalar("0.3")) < BigScalar(1e-70));
  BigScalar shift = bglue::numeric::wrap(BigScalar("0.1") + BigScalar(1), alpha);
  CHECK(abs(q.x[0].big() - shift) < BigScalar(1e-70));
}

TEST_CASE("relations hold in every action") {
  for (const auto& t : action_targets()) {
    CAPTURE(t);
    ActionSpec s = build_action(t);
    RelationReport r = check_relations(s, 10, 3);
    CHECK(r.ok);
    CHECK(r.samples == 10);
    CHECK(s.to_json()["target"] == t);
  }
  CHECK_FALSE(build_action("calegari_sphere").smooth);
}

TEST_CASE("word maps agree with closed-form elements") {
  std::mt19937_64 rng(8);
  for (const char* t : {"sphere", "plane", "torus"}) {
    ActionSpec s = build_action(t);
    for (int i = 0; i < 10; ++i) {
      Word w = random_word(rng, 8);
      Point p = s.model.sample_interior(rng);
      Point a = bglue::geometry::evaluate(word_map(s, w), p);
      Point b = bglue::geometry::evaluate(s.element(evaluate(w)), p);
      CHECK(bglue::geometry::point_distance(a, b) < TolerancePolicy{}.path_defect());
    }
  }
}
