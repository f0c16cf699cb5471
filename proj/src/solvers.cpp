#include "minimax/solvers.hpp"

#include <cmath>

#include "minimax/errors.hpp"

namespace minimax {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::prox_gda: return "prox_gda";
    case Algorithm::prox_altgda: return "prox_altgda";
    case Algorithm::prox_altgdam: return "prox_altgdam";
  }
  return "prox_altgdam";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "prox_gda") return Algorithm::prox_gda;
  if (text == "prox_altgda") return Algorithm::prox_altgda;
  if (text == "prox_altgdam") return Algorithm::prox_altgdam;
  throw ValidationError("unknown algorithm '" + text + "' (expected prox_gda, prox_altgda, prox_altgdam)");
}

void SolverConfig::validate() const {
  auto bad = [](const std::string& what) { throw ValidationError("invalid solver config: " + what); };
  if (!(eta_x > 0) || !std::isfinite(eta_x)) bad("eta_x must be > 0");
  if (!(eta_y > 0) || !std::isfinite(eta_y)) bad("eta_y must be > 0");
  if (!(beta >= 0 && beta < 1)) bad("beta must lie in [0, 1)");
  if (!(gamma >= 0 && gamma < 1)) bad("gamma must lie in [0, 1)");
  if (algorithm != Algorithm::prox_altgdam && (beta != 0 || gamma != 0)) {
    bad(to_string(algorithm) + " uses no momentum; beta and gamma must be 0");
  }
}

SolverConfig default_config(const MinimaxProblem& p, Algorithm algorithm) {
  const double L = p.L();
  const double kappa = p.kappa();
  SolverConfig c;
  c.algorithm = algorithm;
  c.eta_y = 1.0 / L;
  switch (algorithm) {
    case Algorithm::prox_altgdam: {
      const double root = std::sqrt(kappa);
      c.eta_x = 1.0 / (56.0 * L * std::pow(kappa, 1.5));
      c.beta = 0.25;
      c.gamma = (root - 1.0) / (root + 1.0);
      break;
    }
    case Algorithm::prox_altgda:
      c.eta_x = 1.0 / (56.0 * L * std::pow(kappa, 1.5));
      break;
    case Algorithm::prox_gda:
      c.eta_x = 1.0 / (kappa * kappa * kappa * (L + 3.0) * (L + 3.0));
      break;
  }
  return c;
}

bool is_altgdam_default(const MinimaxProblem& p, const SolverConfig& config) {
  if (config.algorithm != Algorithm::prox_altgdam) return false;
  const auto ref = default_config(p, Algorithm::prox_altgdam);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
  return close(config.eta_x, ref.eta_x) && close(config.eta_y, ref.eta_y) && config.beta >= 0 &&
         config.beta <= 0.25 && (close(config.gamma, ref.gamma) || config.gamma == ref.gamma);
}

SolverState SolverState::initial(RealVector x0, RealVector y0) {
  SolverState s{x0, y0, x0, y0, 0};
  return s;
}

namespace {

void check_state(const MinimaxProblem& p, const SolverState& s) {
  if (s.x.dim() != p.dim_x() || s.x_prev.dim() != p.dim_x() || s.y.dim() != p.dim_y() ||
      s.y_prev.dim() != p.dim_y()) {
    throw ContractViolation("solver step: state dimensions do not match the problem");
  }
}

void check_algorithm(const SolverConfig& c, Algorithm expected) {
  if (c.algorithm != expected) {
    throw ContractViolation("solver step: config is for " + to_string(c.algorithm) + ", not " +
                            to_string(expected));
  }
}

/// Runs fn, converting non-finite arithmetic into a DivergenceError.
template <class Fn>
auto guarded(std::int64_t t, const char* quantity, Fn&& fn) {
  try {
    return fn();
  } catch (const NonFiniteValue&) {
    throw DivergenceError(t, quantity);
  }
}

SolverState advance(const SolverState& s, RealVector x_next, RealVector y_next) {
  return SolverState{std::move(x_next), std::move(y_next), s.x, s.y, s.t + 1};
}

}  // namespace

SolverState step_altgdam(const MinimaxProblem& p, const SolverState& s, const SolverConfig& c) {
  check_algorithm(c, Algorithm::prox_altgdam);
  check_state(p, s);
  auto x_tilde = guarded(s.t, "x_tilde", [&] { return axpy(c.beta, sub(s.x, s.x_prev), s.x); });
  auto x_next = guarded(s.t, "x", [&] {
    return p.g().prox(axpy(-c.eta_x, p.grad1(s.x, s.y), x_tilde), c.eta_x);
  });
  auto y_tilde = guarded(s.t, "y_tilde", [&] { return axpy(c.gamma, sub(s.y, s.y_prev), s.y); });
  auto y_next = guarded(s.t, "y", [&] {
    return p.h().prox(axpy(c.eta_y, p.grad2(x_next, y_tilde), y_tilde), c.eta_y);
  });
  return advance(s, std::move(x_next), std::move(y_next));
}

SolverState step_altgda(const MinimaxProblem& p, const SolverState& s, const SolverConfig& c) {
  check_algorithm(c, Algorithm::prox_altgda);
  check_state(p, s);
  auto x_next = guarded(s.t, "x", [&] { return p.g().prox(axpy(-c.eta_x, p.grad1(s.x, s.y), s.x), c.eta_x); });
  auto y_next = guarded(s.t, "y", [&] { return p.h().prox(axpy(c.eta_y, p.grad2(x_next, s.y), s.y), c.eta_y); });
  return advance(s, std::move(x_next), std::move(y_next));
}

SolverState step_gda(const MinimaxProblem& p, const SolverState& s, const SolverConfig& c) {
  check_algorithm(c, Algorithm::prox_gda);
  check_state(p, s);
  auto x_next = guarded(s.t, "x", [&] { return p.g().prox(axpy(-c.eta_x, p.grad1(s.x, s.y), s.x), c.eta_x); });
  auto y_next = guarded(s.t, "y", [&] { return p.h().prox(axpy(c.eta_y, p.grad2(s.x, s.y), s.y), c.eta_y); });
  return advance(s, std::move(x_next), std::move(y_next));
}

SolverState step(const MinimaxProblem& p, const SolverState& s, const SolverConfig& c) {
  switch (c.algorithm) {
    case Algorithm::prox_gda: return step_gda(p, s, c);
    case Algorithm::prox_altgda: return step_altgda(p, s, c);
    case Algorithm::prox_altgdam: return step_altgdam(p, s, c);
  }
  return step_altgdam(p, s, c);
}

}  // namespace minimax
