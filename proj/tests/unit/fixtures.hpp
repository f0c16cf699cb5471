#pragma once

#include <memory>

#include "minimax/problems.hpp"

namespace fixtures {

/// 1x1 QuadCoupled with Q=[q], A=[a].
inline std::shared_ptr<const minimax::QuadCoupledProblem> quad_1d(double q, double a, double b, double mu,
                                                                  minimax::ProxOperator g = {}) {
  minimax::SpectralData d;
  d.q = {q};
  d.sigma = {a};
  d.b = {b};
  d.mu = mu;
  d.g = g;
  return std::make_shared<minimax::QuadCoupledProblem>(d, 1, 1);
}

inline std::shared_ptr<const minimax::SparseAdversarialProblem> sparse_1d(double q, double a, double b, double mu,
                                                                          double lambda) {
  minimax::SpectralData d;
  d.q = {q};
  d.sigma = {a};
  d.b = {b};
  d.mu = mu;
  d.h = minimax::ProxOperator::l1(lambda);
  return std::make_shared<minimax::SparseAdversarialProblem>(d, 1, 1);
}

inline minimax::ProblemPtr random_problem(minimax::Family family, double kappa, std::size_t m, std::size_t n,
                                          std::uint64_t seed) {
  minimax::ProblemSpec ps;
  ps.family = family;
  ps.kappa_target = kappa;
  ps.dim_x = m;
  ps.dim_y = n;
  ps.seed = seed;
  if (family == minimax::Family::sparse_adversarial) {
    ps.g_kind = minimax::ProxKind::l1;
    ps.g_weight = 0.1;
  }
  return minimax::generate(ps);
}

}  // namespace fixtures
