#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minimax/harness.hpp"
#include "minimax/problems.hpp"
#include "minimax/solvers.hpp"

namespace minimax {

struct SweepSpec {
  std::vector<double> kappa_grid{2, 4, 8, 16, 32, 64};
  double eps = 1e-4;
  int problems_per_kappa = 3;
  std::vector<Algorithm> algorithms{Algorithm::prox_altgdam, Algorithm::prox_gda};
  /// kappa_target and seed are overwritten per instance; mu stays fixed.
  ProblemSpec base{};
  std::uint64_t seed = 0;
  /// Runs that have not reached eps by this many steps are censored.
  std::int64_t max_iters = 10'000'000;

  /// Throws ValidationError: grid needs >= 4 increasing points >= 2 spanning a
  /// decade, at least 3 problems per kappa, a nonempty algorithm list.
  void validate() const;
};

struct SweepCell {
  Algorithm algorithm = Algorithm::prox_altgdam;
  double kappa = 0.0;
  int instance = 0;
  std::int64_t iterations = 0;  // iterations to eps, or steps taken if censored
  bool censored = false;
  std::string error;

  bool operator==(const SweepCell&) const = default;
};

struct ExponentFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::prox_altgdam;
  /// Median iterations per grid point; absent when the median run is censored.
  std::vector<std::optional<double>> medians;
  int censored_cells = 0;
  std::optional<ExponentFit> fit;
  /// Why fit is absent, or which grid points were left out of it.
  std::string flag;
};

struct SweepReport {
  std::vector<SweepCell> cells;  // ordered by (kappa, instance, algorithm)
  std::vector<AlgorithmSummary> summaries;
};

/// Seed of problem instance `instance` at grid index `k`; shared by all algorithms.
std::uint64_t instance_seed(std::uint64_t sweep_seed, std::size_t k, int instance);

SweepCell run_cell(const SweepSpec& spec, std::size_t k, int instance, Algorithm algorithm);

/// Reference implementation: one cell after another.
SweepReport sweep_serial(const SweepSpec& spec);
/// Cells fan out over OpenMP threads (0 = runtime default); the report is
/// identical to sweep_serial.
SweepReport sweep(const SweepSpec& spec, int threads = 0);

/// MINIMAX_KIT_THREADS as a thread cap, 0 when unset or "0".
int threads_from_env();

/// Ordinary least squares of log T on log kappa.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points);

SweepReport summarize(const SweepSpec& spec, std::vector<SweepCell> cells);

inline constexpr const char* kSweepHeader = "algorithm,kappa,instance,iterations,censored";
inline constexpr const char* kSummaryHeader = "algorithm,exponent,intercept,r2";

std::string sweep_to_csv(const std::vector<SweepCell>& cells);
std::vector<SweepCell> sweep_from_csv(const std::string& text);
/// Absent fits are written as nan.
std::string summary_to_csv(const std::vector<AlgorithmSummary>& summaries);
std::vector<AlgorithmSummary> summary_from_csv(const std::string& text);

/// Constant in the aggregate bound on the squared gradient mapping.
inline constexpr double kAggregateConstant = 10092.0;

struct AggregateBoundReport {
  double lhs = 0.0;  // sum over t >= 2 of ||G(x_t)||^2
  double rhs = 0.0;  // 10092 L kappa^1.5 (H(z_0) - lower_bound)
  double ratio = 0.0;
  bool pass = false;
  /// lower_bound > H(z_0), so the right side is negative.
  bool impossible_input = false;
};

/// Requires rows for every t from 0 (diag_every = 1) and a config at the
/// prox_altgdam defaults; throws InapplicableError otherwise.
AggregateBoundReport check_aggregate_bound(const RunTrace& trace, const MinimaxProblem& p,
                                           const SolverConfig& config, double lower_bound);

}  // namespace minimax
