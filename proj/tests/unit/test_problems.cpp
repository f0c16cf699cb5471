#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fixtures.hpp"
#include "minimax/errors.hpp"
#include "minimax/oracles.hpp"

using namespace minimax;

namespace {

const SpectralProblem& spectral(const ProblemPtr& p) { return dynamic_cast<const SpectralProblem&>(*p); }

}  // namespace

TEST_CASE("generate 1x1 at kappa 1") {
  ProblemSpec ps;
  ps.dim_x = ps.dim_y = 1;
  ps.kappa_target = 1;
  const auto p = generate(ps);
  const auto& d = spectral(p).data();
  CHECK(p->L() == 1);
  CHECK(std::max({std::abs(d.q[0]), d.sigma[0], 1.0}) == 1);
  CHECK(d.q[0] < 0);
  CHECK(d.q[0] + d.sigma[0] * d.sigma[0] >= 0.01);
}

TEST_CASE("generate is deterministic") {
  ProblemSpec ps;
  ps.family = Family::sparse_adversarial;
  ps.seed = 99;
  CHECK(generate(ps)->to_document().to_string() == generate(ps)->to_document().to_string());
  ps.seed = 100;
  const auto other = generate(ps)->to_document().to_string();
  ps.seed = 99;
  CHECK(generate(ps)->to_document().to_string() != other);
}

TEST_CASE("L equals kappa times mu exactly") {
  ProblemSpec ps;
  ps.kappa_target = 100;
  ps.mu = 0.1;
  const auto p = generate(ps);
  CHECK(p->L() == 10);
  CHECK(std::abs(p->kappa() - 100) <= 1e-12 * 100);
}

TEST_CASE("generated problems satisfy the structural invariants") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    ProblemSpec ps;
    ps.family = i % 2 ? Family::sparse_adversarial : Family::quad_coupled;
    ps.dim_x = 1 + rng.next_u64() % 12;
    ps.dim_y = 1 + rng.next_u64() % 12;
    ps.kappa_target = 1 + rng.uniform(0, 200);
    ps.mu = rng.uniform(0.1, 3);
    ps.seed = rng.next_u64();
    const auto p = generate(ps);
    const auto& s = spectral(p);
    CHECK(std::abs(p->kappa() - ps.kappa_target) <= 1e-12 * ps.kappa_target);
    CHECK(s.lambda_min_q() < 0);
    CHECK(s.coercivity_margin() >= 0.01 * p->L() * (1 - 1e-12));
    CHECK(std::isfinite(p->objective_lower_bound()));
  }
}

TEST_CASE("invalid specs are rejected") {
  ProblemSpec ps;
  ps.kappa_target = 0.5;
  CHECK_THROWS_WITH_AS(generate(ps), doctest::Contains("kappa_target"), ValidationError);
  ps = {};
  ps.mu = 0;
  CHECK_THROWS_AS(generate(ps), ValidationError);
  ps = {};
  ps.family = Family::sparse_adversarial;
  ps.h_weight = 0;
  CHECK_THROWS_AS(generate(ps), ValidationError);
  ps = {};
  ps.g_kind = ProxKind::box;
  ps.g_lo = 1;
  ps.g_hi = 0;
  CHECK_THROWS_AS(generate(ps), ValidationError);
}

TEST_CASE("family regularizer contracts") {
  SpectralData d;
  d.q = {-0.5};
  d.sigma = {1};
  d.b = {0};
  d.h = ProxOperator::l1(1);
  CHECK_THROWS_AS(QuadCoupledProblem(d, 1, 1), ContractViolation);
  d.h = ProxOperator::zero();
  CHECK_THROWS_AS(SparseAdversarialProblem(d, 1, 1), ContractViolation);
  CHECK_THROWS_AS(QuadCoupledProblem(d, 2, 1), ContractViolation);
}

TEST_CASE("smoothness report on the 1x1 example") {
  const auto p = fixtures::quad_1d(-0.5, 1, 0, 1);
  Rng rng(3);
  const auto rep = check_smoothness(*p, rng, 200);
  CHECK(rep.ok);
  CHECK(rep.max_grad_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.min_concavity == doctest::Approx(1.0).epsilon(1e-12));
  // The joint Hessian [[-0.5, 1], [1, -1]] has norm about 1.78.
  CHECK(rep.max_joint_ratio > 1.5);
  CHECK_THROWS_AS(check_smoothness(*p, rng, 0), ContractViolation);
}

TEST_CASE("smoothness holds on generated problems") {
  Rng rng(11);
  for (auto fam : {Family::quad_coupled, Family::sparse_adversarial}) {
    for (double kappa : {2.0, 30.0}) {
      const auto p = fixtures::random_problem(fam, kappa, 6, 4, 8);
      const auto rep = check_smoothness(*p, rng, 300);
      CHECK(rep.ok);
      CHECK(rep.max_grad_ratio <= 1 + 1e-9);
      CHECK(rep.min_concavity >= p->mu() * (1 - 1e-9));
    }
  }
}

TEST_CASE("closed-form y* satisfies inner optimality") {
  Rng rng(17);
  for (auto fam : {Family::quad_coupled, Family::sparse_adversarial}) {
    const auto p = fixtures::random_problem(fam, 16, 5, 7, 4);
    const double lambda = fam == Family::sparse_adversarial ? p->h().weight() : 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto x = rng.uniform_vector(p->dim_x(), -10, 10);
      const auto y = *p->closed_form_y_star(x);
      const auto g = p->grad2(x, y);
      for (std::size_t j = 0; j < y.dim(); ++j) {
        // grad2 f must lie in the subdifferential of h at y*.
        if (y[j] != 0) CHECK(std::abs(g[j] - lambda * (y[j] > 0 ? 1 : -1)) <= 1e-10 * std::max(1.0, std::abs(g[j])));
        else CHECK(std::abs(g[j]) <= lambda + 1e-10);
      }
    }
  }
}

TEST_CASE("closed-form Phi matches the definition and the lower bound") {
  Rng rng(19);
  for (auto fam : {Family::quad_coupled, Family::sparse_adversarial}) {
    const auto p = fixtures::random_problem(fam, 8, 6, 3, 21);
    const double lb = p->objective_lower_bound();
    for (int i = 0; i < 200; ++i) {
      const auto x = rng.uniform_vector(p->dim_x(), -10, 10);
      const auto y = *p->closed_form_y_star(x);
      const double phi = *p->closed_form_phi(x);
      CHECK(std::abs(phi - (p->f(x, y) - p->h().evaluate(y))) <= 1e-10 * std::max(1.0, std::abs(phi)));
      CHECK(phi + p->g().evaluate(x) >= lb - 1e-12 * std::max(1.0, std::abs(lb)));
    }
  }
}

TEST_CASE("lower bound is attained on a 1x1 problem") {
  // Phi(x) = 1/2 q x^2 + (a x + b)^2 / 2 with q=-0.5, a=1, b=1: minimum -1/2 at x=-2.
  const auto p = fixtures::quad_1d(-0.5, 1, 1, 1);
  CHECK(p->objective_lower_bound() == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(*p->closed_form_phi({-2}) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("serialization round-trips exactly") {
  const auto dir = std::filesystem::temp_directory_path() / "minimax_problems_test";
  std::filesystem::create_directories(dir);
  for (auto fam : {Family::quad_coupled, Family::sparse_adversarial}) {
    ProblemSpec ps;
    ps.family = fam;
    ps.dim_x = 5;
    ps.dim_y = 3;
    ps.g_kind = ProxKind::box;
    ps.seed = 77;
    const auto p = generate(ps);
    const auto path = (dir / "p.txt").string();
    write_problem_file(*p, path);
    const auto q = read_problem_file(path);
    CHECK(q->to_document().to_string() == p->to_document().to_string());
    CHECK(q->family() == fam);
    CHECK(q->g() == p->g());
    CHECK(q->h() == p->h());
    const RealVector x{1, -2, 0.5, 3, -0.25}, y{0.3, -1, 2};
    CHECK(q->f(x, y) == p->f(x, y));
  }
}

TEST_CASE("problem documents reject unknown keys") {
  auto doc = fixtures::quad_1d(-0.5, 1, 0, 1)->to_document();
  doc.set("sigmaa", "1");
  CHECK_THROWS_WITH_AS(problem_from_document(doc), doctest::Contains("did you mean 'sigma'"), ValidationError);
}
