#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "minimax/errors.hpp"
#include "minimax/oracles.hpp"
#include "minimax/solvers.hpp"

using namespace minimax;

namespace {

SolverConfig manual(Algorithm a, double eta_x, double eta_y, double beta = 0, double gamma = 0) {
  SolverConfig c;
  c.algorithm = a;
  c.eta_x = eta_x;
  c.eta_y = eta_y;
  c.beta = beta;
  c.gamma = gamma;
  return c;
}

}  // namespace

TEST_CASE("default configs") {
  const auto p9 = generate([] {
    ProblemSpec s;
    s.kappa_target = 9;
    return s;
  }());
  CHECK(default_config(*p9, Algorithm::prox_altgdam).gamma == 0.5);
  const auto p1 = fixtures::quad_1d(-0.5, 1, 0, 1);
  CHECK(default_config(*p1, Algorithm::prox_altgdam).gamma == 0);

  const auto p4 = fixtures::quad_1d(-2, 4, 0, 1);
  const auto c = default_config(*p4, Algorithm::prox_altgdam);
  CHECK(c.eta_x == 1.0 / 1792);
  CHECK(c.eta_y == 0.25);
  CHECK(c.beta == 0.25);
  CHECK(default_config(*p4, Algorithm::prox_altgda).eta_x == 1.0 / 1792);
  const auto gda = default_config(*p4, Algorithm::prox_gda);
  CHECK(gda.eta_x == 1.0 / (64.0 * 49.0));
  CHECK(gda.beta == 0);
  CHECK(gda.gamma == 0);
  CHECK(is_altgdam_default(*p4, c));
  auto smaller_beta = c;
  smaller_beta.beta = 0.1;
  CHECK(is_altgdam_default(*p4, smaller_beta));
  auto bigger_step = c;
  bigger_step.eta_x *= 10;
  CHECK_FALSE(is_altgdam_default(*p4, bigger_step));
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(manual(Algorithm::prox_gda, 0.1, 1, 0.2).validate(), ValidationError);
  CHECK_THROWS_AS(manual(Algorithm::prox_altgda, 0.1, 1, 0, 0.3).validate(), ValidationError);
  CHECK_THROWS_AS(manual(Algorithm::prox_altgdam, 0, 1).validate(), ValidationError);
  CHECK_THROWS_AS(manual(Algorithm::prox_altgdam, 0.1, 1, 1.0).validate(), ValidationError);
  CHECK_NOTHROW(manual(Algorithm::prox_altgdam, 0.1, 1, 0.25, 0.9).validate());
  CHECK(parse_algorithm("prox_gda") == Algorithm::prox_gda);
  CHECK_THROWS_AS(parse_algorithm("gda"), ValidationError);
}

TEST_CASE("hand-evaluated 1-d step") {
  const auto p = fixtures::quad_1d(-0.5, 1, 0, 1);
  const auto s = SolverState::initial({1}, {0});
  const auto m = step_altgdam(*p, s, manual(Algorithm::prox_altgdam, 0.1, 1));
  CHECK(m.x[0] == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(m.y[0] == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(m.t == 1);
  CHECK(m.x_prev == s.x);
  CHECK(m.y_prev == s.y);
  const auto a = step_altgda(*p, s, manual(Algorithm::prox_altgda, 0.1, 1));
  CHECK(a == m);
  const auto g = step_gda(*p, s, manual(Algorithm::prox_gda, 0.1, 1));
  CHECK(g.x[0] == doctest::Approx(1.05).epsilon(1e-15));
  CHECK(g.y[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("momentum-off AltGDAm is AltGDA bit for bit") {
  Rng rng(41);
  const auto p = fixtures::random_problem(Family::sparse_adversarial, 16, 5, 6, 2);
  auto s1 = SolverState::initial(rng.uniform_vector(5, -1, 1), rng.uniform_vector(6, -1, 1));
  auto s2 = s1;
  const auto cm = manual(Algorithm::prox_altgdam, 1e-3, 1 / p->L());
  const auto ca = manual(Algorithm::prox_altgda, 1e-3, 1 / p->L());
  for (int t = 0; t < 50; ++t) {
    s1 = step(*p, s1, cm);
    s2 = step(*p, s2, ca);
    REQUIRE(s1 == s2);
  }
}

TEST_CASE("AltGDA equals GDA when the coupling vanishes") {
  SpectralData d;
  d.q = {0.5, 0.3};
  d.sigma = {0, 0};
  d.b = {0.4, -1};
  const QuadCoupledProblem p(d, 2, 2);
  auto s1 = SolverState::initial({1, -1}, {0.2, 0.3});
  auto s2 = s1;
  for (int t = 0; t < 20; ++t) {
    s1 = step(p, s1, manual(Algorithm::prox_altgda, 0.01, 1));
    s2 = step(p, s2, manual(Algorithm::prox_gda, 0.01, 1));
    REQUIRE(s1.x == s2.x);
    REQUIRE(s1.y == s2.y);
  }
}

TEST_CASE("exact saddles are fixed points") {
  const double q = -0.5, a = 1, b = 0.7, mu = 1;
  const auto p = fixtures::quad_1d(q, a, b, mu);
  const double x = -a * b / mu / (q + a * a / mu);
  const double y = (a * x + b) / mu;
  const auto s = SolverState::initial({x}, {y});
  for (auto alg : {Algorithm::prox_gda, Algorithm::prox_altgda, Algorithm::prox_altgdam}) {
    const auto n = step(*p, s, default_config(*p, alg));
    CHECK(std::abs(n.x[0] - x) <= 1e-12);
    CHECK(std::abs(n.y[0] - y) <= 1e-12);
  }
}

TEST_CASE("ascent gradient uses the extrapolated y") {
  const double q = -0.5, a = 1, b = 0.2, mu = 1;
  const auto p = fixtures::quad_1d(q, a, b, mu);
  const double ex = 0.1, ey = 0.5, beta = 0.25, gamma = 0.6;
  const auto c = manual(Algorithm::prox_altgdam, ex, ey, beta, gamma);
  const auto s2 = step(*p, step(*p, SolverState::initial({1}, {0}), c), c);

  double x0 = 1, y0 = 0;
  double x1 = x0 - ex * (q * x0 + a * y0);
  double y1 = y0 + ey * (a * x1 + b - mu * y0);
  double x2 = x1 + beta * (x1 - x0) - ex * (q * x1 + a * y1);
  double yt = y1 + gamma * (y1 - y0);
  double y2 = yt + ey * (a * x2 + b - mu * yt);
  double y2_wrong = yt + ey * (a * x2 + b - mu * y1);
  CHECK(s2.x[0] == doctest::Approx(x2).epsilon(1e-15));
  CHECK(s2.y[0] == doctest::Approx(y2).epsilon(1e-15));
  CHECK(std::abs(y2 - y2_wrong) > 1e-3);
}

TEST_CASE("divergence is reported with t and quantity") {
  const auto p = fixtures::quad_1d(-0.5, 1, 0, 1);
  auto s = SolverState::initial({1}, {1});
  const auto c = manual(Algorithm::prox_gda, 1e300, 1);
  try {
    for (int i = 0; i < 10; ++i) s = step(*p, s, c);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.t() >= 0);
    CHECK_FALSE(e.quantity().empty());
  }
}

TEST_CASE("contract checks") {
  const auto p = fixtures::quad_1d(-0.5, 1, 0, 1);
  const auto s = SolverState::initial({1}, {0});
  CHECK_THROWS_AS(step_gda(*p, s, manual(Algorithm::prox_altgda, 0.1, 1)), ContractViolation);
  CHECK_THROWS_AS(step(*p, SolverState::initial({1, 2}, {0}), manual(Algorithm::prox_gda, 0.1, 1)),
                  ContractViolation);
  const auto init = SolverState::initial({3}, {4});
  CHECK(init.x_prev == init.x);
  CHECK(init.y_prev == init.y);
  CHECK(init.t == 0);
}

TEST_CASE("Lyapunov function decreases at the default config") {
  for (auto fam : {Family::quad_coupled, Family::sparse_adversarial}) {
    for (double kappa : {4.0, 16.0}) {
      const auto p = fixtures::random_problem(fam, kappa, 6, 5, 13);
      const auto c = default_config(*p, Algorithm::prox_altgdam);
      YStarOracle o;
      auto s = SolverState::initial(RealVector::zeros(6), RealVector::zeros(5));
      double h = lyapunov(*p, s, c, o);
      for (int t = 0; t < 500; ++t) {
        s = step(*p, s, c);
        const double hn = lyapunov(*p, s, c, o);
        REQUIRE(hn <= h + 1e-9 * std::max(1.0, std::abs(h)));
        h = hn;
      }
    }
  }
}
