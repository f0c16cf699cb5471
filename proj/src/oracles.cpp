#include "minimax/oracles.hpp"

#include <cmath>
#include <limits>

#include "minimax/errors.hpp"
#include "minimax/solvers.hpp"

namespace minimax {

std::string to_string(YStarMode mode) { return mode == YStarMode::closed_form ? "closed_form" : "iterative"; }

YStarOracle::YStarOracle(YStarMode mode, double inner_tol, int inner_max_iters)
    : mode_(mode), inner_tol_(inner_tol), inner_max_iters_(inner_max_iters) {
  if (!(inner_tol > 0)) throw ContractViolation("YStarOracle: inner_tol must be positive");
  if (inner_max_iters < 1) throw ContractViolation("YStarOracle: inner_max_iters must be positive");
}

double nesterov_momentum(double kappa) {
  const double root = std::sqrt(kappa);
  return (root - 1.0) / (root + 1.0);
}

RealVector nesterov_ascent_step(const MinimaxProblem& p, const RealVector& x, const RealVector& y,
                                const RealVector& y_prev, double momentum) {
  const double step = 1.0 / p.L();
  const auto extrapolated = axpy(momentum, sub(y, y_prev), y);
  return p.h().prox(axpy(step, p.grad2(x, extrapolated), extrapolated), step);
}

YStarReport YStarOracle::solve_iterative(const MinimaxProblem& p, const RealVector& x, const RealVector* start) {
  if (x.dim() != p.dim_x()) throw ContractViolation("y_star: x has wrong dimension");
  const double momentum = nesterov_momentum(p.kappa());

  RealVector y = start ? *start : (warm_ && warm_->dim() == p.dim_y() ? *warm_ : RealVector::zeros(p.dim_y()));
  RealVector y_prev = y;
  YStarReport rep{y, 0, 0.0, 0.0};
  for (int k = 1; k <= inner_max_iters_; ++k) {
    auto next = nesterov_ascent_step(p, x, y, y_prev, momentum);
    // Below ~ulp(||y||) the increment is pure rounding and cannot shrink further.
    const double tol = std::max(inner_tol_, 8.0 * std::numeric_limits<double>::epsilon() * norm2(next));
    rep.last_step = distance(next, y);
    y_prev = std::move(y);
    y = std::move(next);
    if (rep.last_step <= tol) {
      rep.iterations = k;
      rep.error_bound = p.kappa() * tol;
      rep.y = y;
      warm_ = y;
      return rep;
    }
  }
  warm_.reset();
  throw NonconvergenceError("y_star: iterative solver hit " + std::to_string(inner_max_iters_) +
                                " iterations with increment " + format_double(rep.last_step),
                            y.to_std(), rep.last_step);
}

RealVector YStarOracle::y_star(const MinimaxProblem& p, const RealVector& x) {
  if (x.dim() != p.dim_x()) throw ContractViolation("y_star: x has wrong dimension");
  if (mode_ == YStarMode::closed_form) {
    auto y = p.closed_form_y_star(x);
    if (!y) throw ContractViolation("y_star: problem has no closed form; use iterative mode");
    return *std::move(y);
  }
  return solve_iterative(p, x).y;
}

YStarOracle default_oracle(const MinimaxProblem& p) {
  const RealVector probe = RealVector::zeros(p.dim_x());
  return YStarOracle(p.closed_form_y_star(probe) ? YStarMode::closed_form : YStarMode::iterative);
}

RealVector y_star(const MinimaxProblem& p, const RealVector& x, YStarOracle& oracle) { return oracle.y_star(p, x); }

double phi_value(const MinimaxProblem& p, const RealVector& x, YStarOracle& oracle) {
  const auto y = oracle.y_star(p, x);
  return p.f(x, y) - p.h().evaluate(y);
}

RealVector grad_phi(const MinimaxProblem& p, const RealVector& x, YStarOracle& oracle) {
  return p.grad1(x, oracle.y_star(p, x));
}

RealVector grad_mapping_from(const MinimaxProblem& p, const RealVector& x, const RealVector& grad, double eta_x) {
  if (!(eta_x > 0)) throw ContractViolation("grad_mapping: eta_x must be positive");
  const auto moved = p.g().prox(axpy(-eta_x, grad, x), eta_x);
  return RealVector::generate(x.dim(), [&](std::size_t i) { return (x[i] - moved[i]) / eta_x; });
}

RealVector grad_mapping(const MinimaxProblem& p, const RealVector& x, double eta_x, YStarOracle& oracle) {
  if (!(eta_x > 0)) throw ContractViolation("grad_mapping: eta_x must be positive");
  return grad_mapping_from(p, x, grad_phi(p, x, oracle), eta_x);
}

LyapunovTerms lyapunov_terms(const MinimaxProblem& p, const SolverState& state, const SolverConfig& config,
                             YStarOracle& oracle) {
  if (state.x.dim() != p.dim_x() || state.x_prev.dim() != p.dim_x() || state.y.dim() != p.dim_y()) {
    throw ContractViolation("lyapunov: state dimensions do not match the problem");
  }
  LyapunovTerms terms;
  terms.g = p.g().evaluate(state.x);
  if (!std::isfinite(terms.g)) {
    throw InfeasibleError("lyapunov: g(x_t) is +inf (x_t outside the regularizer's feasible set)");
  }
  const auto ys = oracle.y_star(p, state.x);
  terms.phi = p.f(state.x, ys) - p.h().evaluate(ys);
  terms.y_gap_sq = squared_distance(state.y, ys);
  terms.x_step_sq = squared_distance(state.x, state.x_prev);
  terms.value = terms.phi + terms.g + 2.0 * p.mu() * terms.y_gap_sq + (config.beta / config.eta_x) * terms.x_step_sq;
  return terms;
}

double lyapunov(const MinimaxProblem& p, const SolverState& state, const SolverConfig& config, YStarOracle& oracle) {
  return lyapunov_terms(p, state, config, oracle).value;
}

RealVector finite_difference_grad_phi(const MinimaxProblem& p, const RealVector& x, YStarOracle& oracle, double h) {
  std::vector<double> out(x.dim());
  std::vector<double> probe = x.to_std();
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    const double hi = x[i] + step, lo = x[i] - step;
    probe[i] = hi;
    const double up = phi_value(p, RealVector(probe), oracle);
    probe[i] = lo;
    const double down = phi_value(p, RealVector(probe), oracle);
    probe[i] = x[i];
    out[i] = (up - down) / (hi - lo);
  }
  return RealVector(std::move(out));
}

}  // namespace minimax
