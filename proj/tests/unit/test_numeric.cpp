#include <doctest.h>

#include <cmath>
#include <random>

#include "bglue/errors.hpp"
#include "bglue/numeric/big_scalar.hpp"
#include "bglue/numeric/finite_difference.hpp"
#include "bglue/numeric/log_scalar.hpp"
#include "bglue/numeric/stretch_primitives.hpp"
#include "bglue/numeric/tolerance.hpp"

using namespace bglue::numeric;
using bglue::DomainError;
using bglue::RangeError;

namespace {

bool close_rel(const BigScalar& got, const BigScalar& want, const BigScalar& rel) {
  return abs(got - want) <= rel * abs(want);
}

}  // namespace

TEST_CASE("BigScalar arithmetic and decimal round trip") {
  BigScalar third = BigScalar(1) / BigScalar(3);
  CHECK(third.precision() == 256);
  BigScalar back(third.to_string());
  CHECK(back == third);

  PrecisionScope p64(64);
  BigScalar t64 = BigScalar(1) / BigScalar(3);
  CHECK(t64.precision() == 64);
  CHECK(BigScalar(t64.to_string()) == t64);
}

TEST_CASE("BigScalar string round trip on random values") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 200; ++i) {
    BigScalar x = exp(BigScalar(u(rng))) / BigScalar(3);
    CHECK(BigScalar(x.to_string()) == x);
  }
}

TEST_CASE("BigScalar rejects malformed text") {
  CHECK_THROWS_AS(BigScalar("0.3x"), bglue::ParameterError);
}

TEST_CASE("log1p is stable where log(1+x) cancels") {
  BigScalar tiny = BigScalar::pow2(-400);
  CHECK(close_rel(log1p(tiny), tiny, BigScalar(1e-70)));
}

TEST_CASE("LogScalar encode/decode and products") {
  BigScalar x(0.3);
  LogScalar lx = LogScalar::encode(x);
  CHECK(lx.sign() == 1);
  CHECK(close_rel(lx.decode(), x, BigScalar(1e-70)));
  LogScalar neg = LogScalar::encode(-x);
  CHECK(neg.sign() == -1);
  CHECK(neg.logmag() == lx.logmag());

  LogScalar prod = lx * neg;
  CHECK(prod.sign() == -1);
  CHECK(prod.logmag() == lx.logmag() + lx.logmag());
  CHECK(LogScalar::zero().is_zero());
  CHECK_THROWS_AS(LogScalar::zero().logmag(), DomainError);
  CHECK((lx + neg).is_zero());
  CHECK(close_rel((lx + lx).decode(), BigScalar(0.6), BigScalar(1e-70)));
}

TEST_CASE("LogScalar holds exp(-exp(1/y)) far below binary range") {
  LogScalar u = phi2(BigScalar(1e-6) * BigScalar(50000));  // y = 0.05
  CHECK(u.sign() == 1);
  LogScalar sq = u * u;
  CHECK(sq.logmag() == u.logmag() + u.logmag());
  CHECK(u < LogScalar::encode(BigScalar::pow2(-1000)));
}

TEST_CASE("phi examples") {
  CHECK(close_rel(phi(BigScalar(1)).decode(), BigScalar("0.36787944117144232159552377016146"),
                  BigScalar(1e-30)));
  CHECK(close_rel(phi(BigScalar("0.5")).decode(), BigScalar("0.13533528323661269189399949497248"),
                  BigScalar(1e-30)));
  CHECK(phi(BigScalar("0.01")).logmag() == -(BigScalar(1) / BigScalar("0.01")));
  CHECK_THROWS_AS(phi(BigScalar(0)), DomainError);
  CHECK_THROWS_AS(phi(BigScalar(-1)), DomainError);
}

TEST_CASE("phi2 examples") {
  // mpmath at 400 bits (tests/oracles/compute_oracles.py)
  CHECK(close_rel(phi2(BigScalar("0.5")).decode(), BigScalar("0.00061797898933109349862"),
                  BigScalar(1e-20)));
  CHECK(close_rel(phi2(BigScalar(1)).decode(), BigScalar("0.065988035845312537077"),
                  BigScalar(1e-20)));
  CHECK(close_rel(phi2(BigScalar("0.05")).logmag(), BigScalar("-485165195.409790277969106830542"),
                  BigScalar(1e-28)));
  CHECK_THROWS_AS(phi2(BigScalar(0)), DomainError);
  CHECK_THROWS_AS(phi2(BigScalar(1e-12)), RangeError);
}

TEST_CASE("phi_inv examples") {
  CHECK(close_rel(phi_inv(LogScalar::from_logmag(BigScalar(-2))), BigScalar("0.5"), BigScalar(1e-70)));
  CHECK(phi_inv(LogScalar::from_logmag(BigScalar(-1))) == BigScalar(1));
  BigScalar inner = phi_inv(phi2(BigScalar("0.1")));
  CHECK(close_rel(inner, phi(BigScalar("0.1")).decode(), BigScalar(1e-60)));
  CHECK(close_rel(inner, BigScalar("0.000045399929762484851536"), BigScalar(1e-20)));
  CHECK_THROWS_AS(phi_inv(LogScalar::encode(BigScalar(2))), DomainError);
  CHECK_THROWS_AS(phi_inv(LogScalar::zero()), DomainError);
  CHECK_THROWS_AS(phi_inv(LogScalar::encode(BigScalar(-0.5))), DomainError);
}

TEST_CASE("phi_inv(phi(y)) = y on a grid") {
  TolerancePolicy tol;
  for (int i = 1; i < 100; ++i) {
    BigScalar y = BigScalar(i) / BigScalar(100);
    CHECK(close_rel(phi_inv(phi(y)), y, tol.roundtrip_rel()));
  }
}

TEST_CASE("phi2 equals phi(phi(y)) in the log domain") {
  TolerancePolicy tol;
  for (int i = 1; i <= 40; ++i) {
    BigScalar y = BigScalar(i) / BigScalar(40);  // exp(1/y) <= e^40 < 1e9 except none
    LogScalar direct = phi2(y);
    LogScalar nested = phi(phi(y).decode());
    CHECK(close_rel(nested.logmag(), direct.logmag(), tol.roundtrip_rel()));
  }
}

TEST_CASE("stable_conjugate_linear examples") {
  for (double y : {0.05, 0.1, 0.3, 0.9}) {
    CHECK(stable_conjugate_linear(BigScalar(1), BigScalar(y)) == BigScalar(y));
  }
  // 1/log(e^10 - ln 2) - 0.1, mpmath oracle
  BigScalar off = stable_conjugate_linear(BigScalar(2), BigScalar("0.1")) - BigScalar("0.1");
  CHECK(close_rel(off, BigScalar("3.1469427498783984017317669548e-7"), BigScalar(1e-25)));
  CHECK(close_rel(off, BigScalar("3.147e-7"), BigScalar(0.01)));

  BigScalar off2 = stable_conjugate_linear_offset(BigScalar(2), BigScalar("0.02"));
  CHECK(close_rel(off2, BigScalar("5.34763007648645113382804543915e-26"), BigScalar(1e-25)));
  BigScalar asym = log(BigScalar(2)) * BigScalar("0.0004") * exp(BigScalar(-50));
  CHECK(close_rel(off2, asym, BigScalar(0.05)));
  CHECK(close_rel(off2, BigScalar("5.35e-26"), BigScalar(0.05)));

  CHECK_THROWS_AS(stable_conjugate_linear(BigScalar(0), BigScalar("0.1")), DomainError);
  CHECK_THROWS_AS(stable_conjugate_linear(BigScalar(2), BigScalar(1)), DomainError);
  // e^{1/y} <= log a
  CHECK_THROWS_AS(stable_conjugate_linear(exp(exp(BigScalar(2))), BigScalar("0.5")), DomainError);
}

TEST_CASE("stable_conjugate_linear is stable across precisions") {
  for (double a : {0.25, 0.5, 1.5, 2.0, 4.0}) {
    for (double y : {0.02, 0.05, 0.1, 0.4, 0.8}) {
      double lo;
      {
        PrecisionScope p(64);
        lo = stable_conjugate_linear(BigScalar(a), BigScalar(y)).to_double();
      }
      double hi = stable_conjugate_linear(BigScalar(a), BigScalar(y)).to_double();
      CHECK(std::abs(lo - hi) <= 1e-10 * std::abs(hi));
    }
  }
}

TEST_CASE("asymptotic constant of the linear conjugate offset") {
  // (offset) e^{1/y} / y^2 -> log a
  BigScalar y("0.02");
  for (double a : {0.5, 2.0, 3.0}) {
    BigScalar ratio = stable_conjugate_linear_offset(BigScalar(a), y) * exp(BigScalar(1) / y) / (y * y);
    CHECK(close_rel(ratio, log(BigScalar(a)), BigScalar(0.01)));
  }
}

TEST_CASE("sandwich: monotone in the germ slope") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.02, 0.2);
  for (int i = 0; i < 50; ++i) {
    BigScalar y(u(rng));
    BigScalar a(2);
    BigScalar lo = stable_conjugate_linear(a / BigScalar(2), y);
    BigScalar hi = stable_conjugate_linear(a * BigScalar(2), y);
    BigScalar mid = stable_conjugate_linear(a * BigScalar(1.3), y);
    CHECK(lo <= mid);
    CHECK(mid <= hi);
  }
}

TEST_CASE("fd_derivative examples") {
  FDConfig cfg;
  auto sq = [](const BigScalar& y) { return y * y; };
  FDResult r = fd_derivative(sq, BigScalar(1), cfg);
  CHECK(abs(r.estimate - BigScalar(2)) < BigScalar(1e-30));

  cfg.order = 3;
  FDResult e = fd_derivative([](const BigScalar& y) { return exp(y); }, BigScalar(0), cfg);
  CHECK(abs(e.estimate - BigScalar(1)) < BigScalar(1e-20));
  CHECK(!e.low_confidence);

  // Independent symbolic derivative (sympy): 1.000037763917101903896518837463095808335
  cfg.order = 1;
  auto closed = [](const BigScalar& y) {
    return BigScalar(1) / log(exp(BigScalar(1) / y) - BigScalar::ln2());
  };
  FDResult c = fd_derivative(closed, BigScalar("0.1"), cfg);
  CHECK(abs(c.estimate - BigScalar("1.000037763917101903896518837463095808335")) < BigScalar(1e-20));
  cfg.order = 2;
  FDResult c2 = fd_derivative(closed, BigScalar("0.1"), cfg);
  CHECK(abs(c2.estimate - BigScalar("0.003839464659156450204227812447880939378237")) <
        BigScalar(1e-15));
}

TEST_CASE("fd_derivative reproduces polynomial derivatives to its error estimate") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<BigScalar> c;
    for (int i = 0; i <= 6; ++i) c.emplace_back(coef(rng));
    auto poly = [&](const BigScalar& x) {
      BigScalar acc;
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
      return acc;
    };
    BigScalar x("0.3");
    for (int k = 1; k <= 4; ++k) {
      // exact k-th derivative
      BigScalar exact;
      for (int i = k; i <= 6; ++i) {
        BigScalar fall(1);
        for (int j = 0; j < k; ++j) fall *= BigScalar(i - j);
        exact += c[i] * fall * pow(x, static_cast<long>(i - k));
      }
      for (Stencil s : {Stencil::central, Stencil::forward, Stencil::backward}) {
        FDConfig cfg;
        cfg.order = k;
        cfg.stencil = s;
        FDResult r = fd_derivative(poly, x, cfg);
        CHECK(abs(r.estimate - exact) <= r.err_estimate + BigScalar(1e-50));
      }
    }
  }
}

TEST_CASE("fd_derivative domain and configuration errors") {
  FDConfig cfg;
  auto id = [](const BigScalar& y) { return y; };
  Interval unit{BigScalar(0), BigScalar(1)};
  CHECK_THROWS_AS(fd_derivative(id, BigScalar("0.001"), cfg, unit), DomainError);
  cfg.stencil = Stencil::forward;
  CHECK_NOTHROW(fd_derivative(id, BigScalar(0), cfg, unit));
  cfg.richardson_levels = 1;
  CHECK_THROWS_AS(fd_derivative(id, BigScalar("0.5"), cfg), bglue::ParameterError);
  cfg.richardson_levels = 4;
  cfg.base_step = BigScalar(0);
  CHECK_THROWS_AS(fd_derivative(id, BigScalar("0.5"), cfg), bglue::ParameterError);
}

TEST_CASE("fd_derivative flags noise-dominated estimates") {
  FDConfig cfg;
  cfg.richardson_levels = 2;
  cfg.base_step = BigScalar(1);
  // Difference quotients 1 and 0.3 at h = 1, 1/2: the correction dwarfs the estimate.
  auto kinked = [](const BigScalar& y) {
    return y * (BigScalar("0.3") + BigScalar("2.8") * (abs(y) - BigScalar("0.25")));
  };
  FDResult r = fd_derivative(kinked, BigScalar(0), cfg);
  CHECK(r.low_confidence);
  CHECK(r.err_estimate > abs(r.estimate));
}
