#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "minimax/errors.hpp"
#include "minimax/oracles.hpp"
#include "minimax/solvers.hpp"
#include "minimax/verify.hpp"

using namespace minimax;

TEST_CASE("y* examples") {
  const auto p = fixtures::quad_1d(-0.5, 1, 0, 2);
  YStarOracle closed(YStarMode::closed_form), iter(YStarMode::iterative);
  CHECK(closed.y_star(*p, {4}) == RealVector{2});
  CHECK(iter.y_star(*p, {4})[0] == doctest::Approx(2).epsilon(1e-12));
  CHECK(closed.y_star(*p, {0}) == RealVector{0});

  // (Ax - b) = 0.5 sits below the threshold 1.
  const auto s = fixtures::sparse_1d(-0.5, 1, -0.5, 1, 1);
  CHECK(closed.y_star(*s, {0}) == RealVector{0});
  CHECK(iter.y_star(*s, {0}) == RealVector{0});
  CHECK_THROWS_AS(closed.y_star(*p, {1, 2}), ContractViolation);
}

TEST_CASE("Phi examples") {
  YStarOracle o;
  const auto p = fixtures::quad_1d(-0.5, 1, 0, 1);
  CHECK(phi_value(*p, {2}, o) == 1);
  CHECK(phi_value(*p, {0}, o) == 0);
  // Moreau envelope: (3 - 1)^2 / 2.
  const auto s = fixtures::sparse_1d(0, 1, 0, 1, 1);
  CHECK(phi_value(*s, {3}, o) == 2);
}

TEST_CASE("grad Phi examples") {
  YStarOracle o;
  const auto p = fixtures::quad_1d(-0.5, 1, 0, 1);
  CHECK(grad_phi(*p, {2}, o) == RealVector{1});
  CHECK(grad_phi(*p, {0}, o) == RealVector{0});
  CHECK(finite_difference_grad_phi(*p, {2}, o)[0] == doctest::Approx(1).epsilon(1e-8));
}

TEST_CASE("grad Phi matches finite differences") {
  Rng rng(23);
  for (auto fam : {Family::quad_coupled, Family::sparse_adversarial}) {
    const auto p = fixtures::random_problem(fam, 16, 5, 5, 2);
    YStarOracle o = default_oracle(*p);
    for (int i = 0; i < 100; ++i) {
      const auto x = rng.uniform_vector(p->dim_x(), -10, 10);
      const auto g = grad_phi(*p, x, o);
      CHECK(distance(g, finite_difference_grad_phi(*p, x, o)) <= 1e-5 * std::max(1.0, norm2(g)));
    }
  }
}

TEST_CASE("gradient mapping") {
  YStarOracle o;
  const auto p = fixtures::quad_1d(-0.5, 1, 0.7, 1);
  // g = 0 reduces G to grad Phi.
  CHECK(grad_mapping(*p, {2}, 0.1, o)[0] == doctest::Approx(grad_phi(*p, {2}, o)[0]).epsilon(1e-14));
  // Critical point of the 1-d problem: (q + a^2/mu) x = -a b / mu.
  const RealVector crit{-0.7 / 0.5};
  CHECK(norm2(grad_mapping(*p, crit, 0.01, o)) <= 1e-10);
  // l1 g with |grad Phi(0)| <= w makes 0 critical.
  const auto l1 = fixtures::quad_1d(-0.5, 1, 0.7, 1, ProxOperator::l1(1));
  CHECK(std::abs(grad_phi(*l1, {0}, o)[0]) <= 1);
  CHECK(grad_mapping(*l1, {0}, 0.05, o) == RealVector{0});
  CHECK_THROWS_AS(grad_mapping(*p, {0}, 0, o), ContractViolation);
}

TEST_CASE("Lyapunov examples") {
  YStarOracle o;
  const auto p = fixtures::quad_1d(-0.5, 1, 0, 1);
  SolverConfig c = default_config(*p, Algorithm::prox_altgdam);
  SolverState s{{2}, {0}, {2}, {0}, 0};
  CHECK(lyapunov(*p, s, c, o) == 9);

  // At y = y*(x) and x = x_prev only Phi + g is left.
  SolverState at{{2}, {2}, {2}, {2}, 3};
  CHECK(lyapunov(*p, at, c, o) == phi_value(*p, {2}, o));

  // beta = 0 drops the momentum term.
  SolverState moved{{2}, {0}, {1}, {0}, 1};
  c.beta = 0;
  CHECK(lyapunov(*p, moved, c, o) == 9);
  c.beta = 0.25;
  CHECK(lyapunov(*p, moved, c, o) == 9 + 0.25 / c.eta_x);

  const auto boxed = fixtures::quad_1d(-0.5, 1, 0, 1, ProxOperator::box(-1, 1));
  CHECK_THROWS_AS(lyapunov(*boxed, s, c, o), InfeasibleError);
}

TEST_CASE("iterative oracle agrees with the closed forms") {
  Rng rng(29);
  for (auto fam : {Family::quad_coupled, Family::sparse_adversarial}) {
    for (double kappa : {4.0, 64.0}) {
      const auto p = fixtures::random_problem(fam, kappa, 8, 8, 6);
      YStarOracle closed(YStarMode::closed_form), iter(YStarMode::iterative);
      const double eta = default_config(*p, Algorithm::prox_altgdam).eta_x;
      for (int i = 0; i < 50; ++i) {
        const auto x = rng.uniform_vector(p->dim_x(), -10, 10);
        CHECK(distance(iter.y_star(*p, x), closed.y_star(*p, x)) <= 1e-8);
        CHECK(distance(grad_mapping(*p, x, eta, closed), grad_mapping(*p, x, eta, iter)) <= 1e-7);
        CHECK(std::abs(phi_value(*p, x, closed) - phi_value(*p, x, iter)) <=
              1e-8 * std::max(1.0, std::abs(phi_value(*p, x, closed))));
      }
    }
  }
}

TEST_CASE("iterative oracle reports and warm-starts") {
  const auto p = fixtures::random_problem(Family::quad_coupled, 64, 4, 4, 1);
  YStarOracle iter(YStarMode::iterative);
  const RealVector x{1, 2, 3, 4};
  const auto cold = iter.solve_iterative(*p, x);
  CHECK(cold.iterations > 1);
  CHECK(cold.error_bound >= distance(cold.y, *p->closed_form_y_star(x)));
  const auto warm = iter.solve_iterative(*p, x);
  CHECK(warm.iterations < cold.iterations);

  YStarOracle tiny(YStarMode::iterative, 1e-12, 2);
  try {
    tiny.y_star(*p, x);
    FAIL("expected nonconvergence");
  } catch (const NonconvergenceError& e) {
    CHECK(e.last_iterate().size() == 4);
    CHECK(e.achieved_gap() > 1e-12);
  }
  CHECK_THROWS_AS(YStarOracle(YStarMode::iterative, 0), ContractViolation);
}

TEST_CASE("regularity constants") {
  Rng rng(31);
  for (auto fam : {Family::quad_coupled, Family::sparse_adversarial}) {
    const auto p = fixtures::random_problem(fam, 16, 6, 6, 12);
    YStarOracle o;
    const double kappa = p->kappa(), L = p->L();
    for (int i = 0; i < 500; ++i) {
      const auto a = rng.uniform_vector(6, -10, 10), b = rng.uniform_vector(6, -10, 10);
      const double d = distance(a, b);
      CHECK(distance(y_star(*p, a, o), y_star(*p, b, o)) <= kappa * d * (1 + 1e-9));
      CHECK(distance(grad_phi(*p, a, o), grad_phi(*p, b, o)) <= L * (1 + kappa) * d * (1 + 1e-9));
    }
  }
}

TEST_CASE("inner solver converges geometrically") {
  Rng rng(37);
  for (double kappa : {4.0, 64.0}) {
    const auto p = fixtures::random_problem(Family::quad_coupled, kappa, 10, 10, 3);
    const double c = inner_rate_constant(*p, rng.uniform_vector(10, -10, 10));
    CHECK(c <= 10);
  }
  CHECK(nesterov_momentum(9) == 0.5);
}
