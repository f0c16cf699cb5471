#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "minimax/core.hpp"
#include "minimax/kvdoc.hpp"
#include "minimax/oracles.hpp"
#include "minimax/problems.hpp"
#include "minimax/solvers.hpp"

namespace minimax {

struct TraceRow {
  std::int64_t t = 0;
  double lyapunov = 0.0;       // H(z_t)
  double objective = 0.0;      // Phi(x_t) + g(x_t)
  double grad_map_norm = 0.0;  // ||G(x_t)||
  double dx_norm = 0.0;        // ||x_t - x_{t-1}||
  double dy_norm = 0.0;        // ||y_t - y_{t-1}||
  double y_gap = 0.0;          // ||y_t - y*(x_t)||

  bool operator==(const TraceRow&) const = default;
};

struct RunMeta {
  std::string problem_id;
  Algorithm algorithm = Algorithm::prox_altgdam;
  SolverConfig config;
  std::uint64_t seed = 0;
  YStarMode y_star_mode = YStarMode::closed_form;
  std::int64_t max_iters = 0;
  double eps = 0.0;
  std::int64_t diag_every = 1;
  /// Number of solver steps taken.
  std::int64_t iterations = 0;
  /// First t with ||G(x_t)|| <= eps, evaluated at every iteration.
  std::optional<std::int64_t> eps_reached_at;
  double min_grad_map_norm = 0.0;
  /// H never rose by more than 1e-9 max(1, |H|) between recorded rows.
  bool lyapunov_monotone = true;
  bool config_at_defaults = false;
  std::string error;

  bool operator==(const RunMeta&) const = default;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  RunMeta meta;
};

struct RunOptions {
  std::int64_t max_iters = 1000;
  double eps = 1e-6;
  std::int64_t diag_every = 1;
  std::optional<RealVector> x0;
  std::optional<RealVector> y0;
  std::optional<YStarOracle> oracle;  // defaults to default_oracle(p)
};

/// Where a run's problem comes from: generated from a spec or read from disk.
using ProblemSource = std::variant<ProblemSpec, std::string>;

struct ConfigOverrides {
  std::optional<double> eta_x;
  std::optional<double> eta_y;
  std::optional<double> beta;
  std::optional<double> gamma;
};

struct RunSpec {
  ProblemSource problem = ProblemSpec{};
  Algorithm algorithm = Algorithm::prox_altgdam;
  ConfigOverrides overrides;
  std::int64_t max_iters = 10000;
  double eps = 1e-6;
  std::int64_t diag_every = 1;
  /// Problem seed when the source is a ProblemSpec.
  std::uint64_t seed = 0;
  /// Fill value for x_0 and y_0.
  double x0_fill = 0.0;
  double y0_fill = 0.0;

  void validate() const;
};

/// Absolute slack on Lyapunov monotonicity checks: 1e-9 max(1, |H|).
double lyapunov_slack(double h);

std::string problem_id(const MinimaxProblem& p);

/// Iterates until min_t ||G(x_t)|| <= eps or t == max_iters. Errors from the
/// solver or oracles are stored in meta.error with the rows computed so far.
RunTrace run(const MinimaxProblem& p, const SolverConfig& config, const RunOptions& options);

struct ResolvedRun {
  ProblemPtr problem;
  SolverConfig config;
  RunOptions options;
};

ResolvedRun resolve(const RunSpec& spec);
RunTrace run(const RunSpec& spec);

/// Smallest t among the rows with grad_map_norm <= eps.
std::optional<std::int64_t> iterations_to_eps(const RunTrace& trace, double eps);

inline constexpr const char* kTraceHeader = "t,lyapunov,objective,grad_map_norm,dx_norm,dy_norm,y_gap";

std::string trace_to_csv(const std::vector<TraceRow>& rows);
std::vector<TraceRow> trace_from_csv(const std::string& text);
KeyValueDoc meta_to_document(const RunMeta& meta);
RunMeta meta_from_document(const KeyValueDoc& doc);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

}  // namespace minimax
