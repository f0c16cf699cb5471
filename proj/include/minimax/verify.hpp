#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minimax/kvdoc.hpp"
#include "minimax/problems.hpp"
#include "minimax/solvers.hpp"

namespace minimax {

inline const std::vector<std::string> kVerifyScopes = {"prox", "regularity", "lyapunov", "bound"};

struct VerifySpec {
  std::vector<std::string> scope = kVerifyScopes;
  std::uint64_t seed = 0;
  std::vector<Family> families{Family::quad_coupled, Family::sparse_adversarial};
  /// Instance i of each family uses kappas[i % kappas.size()].
  std::vector<double> kappas{4, 16, 64};
  int instances = 20;  // per family
  /// Instance dimensions cycle through these; every third instance is
  /// widened by one in x or in y.
  std::vector<std::size_t> dims{2, 5, 10, 20, 50};
  /// l1 weight of g on sparse_adversarial instances.
  double sparse_g_weight = 0.1;

  int prox_trials = 1000;
  int lipschitz_pairs = 500;
  int fd_points = 100;
  int oracle_points = 100;
  /// kappa values for the inner-solver rate fit (quad_coupled only).
  std::vector<double> rate_kappas{4, 64};

  int lyapunov_iters = 2000;
  /// prox_altgdam eta_x used by the lyapunov suite: eta_x if set, otherwise
  /// eta_x_scale times the default.
  double eta_x_scale = 1.0;
  std::optional<double> eta_x;

  double bound_eps = 1e-8;
  std::int64_t bound_max_iters = 2'000'000;

  void validate() const;
};

struct CheckResult {
  std::string name;  // "<suite>.<invariant>"
  bool pass = true;
  /// Smallest remaining slack over all trials, in the check's own units;
  /// negative iff the check failed.
  double worst_margin = 0.0;
  int trials = 0;
  int failures = 0;
  std::string detail;
  /// First failing instance, for replay.
  ProblemPtr problem;
  std::optional<SolverConfig> config;
  std::optional<KeyValueDoc> prox_case;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
  const CheckResult* find(const std::string& name) const;
};

/// Problem instance i of the given family.
ProblemPtr verify_instance(const VerifySpec& spec, Family family, int i);

std::vector<CheckResult> verify_prox(const VerifySpec& spec);
std::vector<CheckResult> verify_regularity(const VerifySpec& spec);
std::vector<CheckResult> verify_lyapunov(const VerifySpec& spec);
std::vector<CheckResult> verify_bound(const VerifySpec& spec);

/// Runs every suite named in spec.scope, in the order of kVerifyScopes.
VerifyReport verify(const VerifySpec& spec);

/// Fitted C in ||y_K - y*|| <= C (1 - kappa^{-1/2})^{K/2} ||y_0 - y*|| over
/// K >= 50, running the inner ascent from y_0 = 0 until the error reaches
/// the rounding floor or max_iters.
double inner_rate_constant(const MinimaxProblem& p, const RealVector& x, int max_iters = 100000);

}  // namespace minimax
