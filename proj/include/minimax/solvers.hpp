#pragma once

#include <cstdint>
#include <string>

#include "minimax/core.hpp"
#include "minimax/problems.hpp"

namespace minimax {

enum class Algorithm { prox_gda, prox_altgda, prox_altgdam };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

struct SolverConfig {
  Algorithm algorithm = Algorithm::prox_altgdam;
  double eta_x = 0.0;
  double eta_y = 0.0;
  double beta = 0.0;   // heavy-ball coefficient on x
  double gamma = 0.0;  // Nesterov coefficient on y

  /// Throws ValidationError if a stepsize is not positive or a momentum lies
  /// outside [0, 1), or if momentum is set for the plain algorithms.
  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

/// Stepsizes for which the Lyapunov decrease is proven:
///   prox_altgdam: eta_x = 1/(56 L kappa^1.5), eta_y = 1/L, beta = 1/4,
///                 gamma = (sqrt(kappa)-1)/(sqrt(kappa)+1)
///   prox_altgda:  eta_x = 1/(56 L kappa^1.5), eta_y = 1/L
///   prox_gda:     eta_x = 1/(kappa^3 (L+3)^2), eta_y = 1/L
SolverConfig default_config(const MinimaxProblem& p, Algorithm algorithm);

/// True when config matches default_config(p, prox_altgdam) except for a
/// possibly smaller beta (relative tolerance 1e-12 on the rest).
bool is_altgdam_default(const MinimaxProblem& p, const SolverConfig& config);

/// z_t plus y_{t-1}, which the Nesterov extrapolation consumes.
struct SolverState {
  RealVector x;
  RealVector y;
  RealVector x_prev;
  RealVector y_prev;
  std::int64_t t = 0;

  /// x_{-1} = x_0, y_{-1} = y_0.
  static SolverState initial(RealVector x0, RealVector y0);
  bool operator==(const SolverState&) const = default;
};

/// Proximal AltGDA with heavy-ball momentum on x and Nesterov momentum on y:
///   x~ = x_t + beta (x_t - x_{t-1})
///   x_{t+1} = prox_{eta_x g}(x~ - eta_x grad1 f(x_t, y_t))
///   y~ = y_t + gamma (y_t - y_{t-1})
///   y_{t+1} = prox_{eta_y h}(y~ + eta_y grad2 f(x_{t+1}, y~))
/// Throws DivergenceError on any non-finite intermediate.
SolverState step_altgdam(const MinimaxProblem& p, const SolverState& s, const SolverConfig& c);
/// Ascent gradient at (x_{t+1}, y_t).
SolverState step_altgda(const MinimaxProblem& p, const SolverState& s, const SolverConfig& c);
/// Both gradients at (x_t, y_t).
SolverState step_gda(const MinimaxProblem& p, const SolverState& s, const SolverConfig& c);
/// Dispatches on c.algorithm.
SolverState step(const MinimaxProblem& p, const SolverState& s, const SolverConfig& c);

}  // namespace minimax
