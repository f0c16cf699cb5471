#pragma once

#include <optional>
#include <string>

#include "minimax/core.hpp"
#include "minimax/problems.hpp"

namespace minimax {

struct SolverState;
struct SolverConfig;

enum class YStarMode { closed_form, iterative };

std::string to_string(YStarMode mode);

struct YStarReport {
  RealVector y;
  int iterations = 0;
  /// Last increment ||y_{k+1} - y_k||.
  double last_step = 0.0;
  /// kappa times the tolerance the increment met; bounds ||y - y*|| since a
  /// step of size 1/L moves at least ||y - y*|| / kappa.
  double error_bound = 0.0;
};

/// Computes y*(x) = argmax_y f(x,y) - h(y).
///
/// The iterative mode runs Nesterov-accelerated proximal ascent with step 1/L
/// and momentum (sqrt(kappa)-1)/(sqrt(kappa)+1), stopping once the increment
/// falls below max(inner_tol, 8 eps ||y||); the second term is the rounding
/// floor for large y. It warm-starts from the previous result,
/// so one instance must not be shared between threads.
class YStarOracle {
 public:
  YStarOracle() = default;
  explicit YStarOracle(YStarMode mode, double inner_tol = 1e-12, int inner_max_iters = 100000);

  YStarMode mode() const { return mode_; }
  double inner_tol() const { return inner_tol_; }
  int inner_max_iters() const { return inner_max_iters_; }

  RealVector y_star(const MinimaxProblem& p, const RealVector& x);
  /// Iterative solve with full diagnostics; ignores mode.
  YStarReport solve_iterative(const MinimaxProblem& p, const RealVector& x, const RealVector* start = nullptr);
  void reset_warm_start() { warm_.reset(); }

 private:
  YStarMode mode_ = YStarMode::closed_form;
  double inner_tol_ = 1e-12;
  int inner_max_iters_ = 100000;
  std::optional<RealVector> warm_;
};

/// One step of the inner ascent: y_next = prox_{h/L}(w + grad2 f(x, w) / L)
/// with w = y + momentum (y - y_prev).
RealVector nesterov_ascent_step(const MinimaxProblem& p, const RealVector& x, const RealVector& y,
                                const RealVector& y_prev, double momentum);

/// (sqrt(kappa)-1)/(sqrt(kappa)+1).
double nesterov_momentum(double kappa);

/// Closed form when the problem provides one, iterative otherwise.
YStarOracle default_oracle(const MinimaxProblem& p);

RealVector y_star(const MinimaxProblem& p, const RealVector& x, YStarOracle& oracle);
/// Phi(x) = f(x, y*(x)) - h(y*(x)).
double phi_value(const MinimaxProblem& p, const RealVector& x, YStarOracle& oracle);
/// grad Phi(x) = grad1 f(x, y*(x)).
RealVector grad_phi(const MinimaxProblem& p, const RealVector& x, YStarOracle& oracle);
/// G(x) = (x - prox_{eta g}(x - eta grad Phi(x))) / eta.
RealVector grad_mapping(const MinimaxProblem& p, const RealVector& x, double eta_x, YStarOracle& oracle);
/// Same mapping with a precomputed grad Phi(x).
RealVector grad_mapping_from(const MinimaxProblem& p, const RealVector& x, const RealVector& grad, double eta_x);

struct LyapunovTerms {
  double phi = 0.0;
  double g = 0.0;
  double y_gap_sq = 0.0;     // ||y - y*(x)||^2
  double x_step_sq = 0.0;    // ||x - x_prev||^2
  double value = 0.0;        // phi + g + 2 mu y_gap_sq + (beta / eta_x) x_step_sq
};

/// H(z) = Phi(x) + g(x) + 2 mu ||y - y*(x)||^2 + (beta / eta_x) ||x - x_prev||^2.
/// Throws InfeasibleError when g(x) = +inf.
double lyapunov(const MinimaxProblem& p, const SolverState& state, const SolverConfig& config,
                YStarOracle& oracle);
LyapunovTerms lyapunov_terms(const MinimaxProblem& p, const SolverState& state, const SolverConfig& config,
                             YStarOracle& oracle);

/// Central differences of phi_value with step h * max(1, |x_i|).
RealVector finite_difference_grad_phi(const MinimaxProblem& p, const RealVector& x, YStarOracle& oracle,
                                      double h = 1e-5);

}  // namespace minimax
