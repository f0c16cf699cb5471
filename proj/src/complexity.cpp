#include "minimax/complexity.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "minimax/errors.hpp"

namespace minimax {

void SweepSpec::validate() const {
  auto bad = [](const std::string& what) { throw ValidationError("invalid sweep spec: " + what); };
  if (kappa_grid.size() < 4) bad("kappa_grid needs at least 4 points for an exponent fit");
  for (std::size_t i = 0; i < kappa_grid.size(); ++i) {
    if (!(kappa_grid[i] >= 2) || !std::isfinite(kappa_grid[i])) bad("kappa_grid values must be >= 2");
    if (i > 0 && !(kappa_grid[i] > kappa_grid[i - 1])) bad("kappa_grid must be strictly increasing");
  }
  if (kappa_grid.back() < 10.0 * kappa_grid.front()) bad("kappa_grid must span at least one decade");
  if (!(eps > 0) || !std::isfinite(eps)) bad("eps must be > 0");
  if (problems_per_kappa < 3) bad("problems_per_kappa must be >= 3");
  if (algorithms.empty()) bad("algorithms must not be empty");
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (algorithms[i] == algorithms[j]) bad("algorithm " + to_string(algorithms[i]) + " listed twice");
    }
  }
  if (max_iters < 1) bad("max_iters must be >= 1");
  auto probe = base;
  probe.kappa_target = kappa_grid.front();
  probe.validate();
}

std::uint64_t instance_seed(std::uint64_t sweep_seed, std::size_t k, int instance) {
  return mix_seed(mix_seed(sweep_seed, k), static_cast<std::uint64_t>(instance));
}

SweepCell run_cell(const SweepSpec& spec, std::size_t k, int instance, Algorithm algorithm) {
  SweepCell cell;
  cell.algorithm = algorithm;
  cell.kappa = spec.kappa_grid.at(k);
  cell.instance = instance;
  try {
    auto ps = spec.base;
    ps.kappa_target = cell.kappa;
    ps.seed = instance_seed(spec.seed, k, instance);
    const auto problem = generate(ps);
    RunOptions options;
    options.max_iters = spec.max_iters;
    options.eps = spec.eps;
    // Only t=0 and the final row are kept; ||G|| is still checked every step.
    options.diag_every = spec.max_iters;
    const auto trace = run(*problem, default_config(*problem, algorithm), options);
    cell.error = trace.meta.error;
    if (trace.meta.eps_reached_at) {
      cell.iterations = *trace.meta.eps_reached_at;
    } else {
      cell.iterations = trace.meta.iterations;
      cell.censored = true;
    }
  } catch (const std::exception& e) {
    cell.error = e.what();
    cell.censored = true;
  }
  return cell;
}

namespace {

struct CellIndex {
  std::size_t k;
  int instance;
  Algorithm algorithm;
};

std::vector<CellIndex> enumerate(const SweepSpec& spec) {
  std::vector<CellIndex> out;
  for (std::size_t k = 0; k < spec.kappa_grid.size(); ++k) {
    for (int i = 0; i < spec.problems_per_kappa; ++i) {
      for (auto a : spec.algorithms) out.push_back({k, i, a});
    }
  }
  return out;
}

std::optional<double> median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double m = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  if (!std::isfinite(m)) return std::nullopt;
  return m;
}

}  // namespace

SweepReport summarize(const SweepSpec& spec, std::vector<SweepCell> cells) {
  SweepReport report;
  report.cells = std::move(cells);
  for (auto a : spec.algorithms) {
    AlgorithmSummary s;
    s.algorithm = a;
    std::vector<std::pair<double, double>> points;
    std::string excluded;
    for (double kappa : spec.kappa_grid) {
      std::vector<double> its;
      for (const auto& c : report.cells) {
        if (c.algorithm != a || c.kappa != kappa) continue;
        if (c.censored) ++s.censored_cells;
        // Censored runs sort above every finished run.
        its.push_back(c.censored ? std::numeric_limits<double>::infinity() : static_cast<double>(c.iterations));
      }
      auto m = its.empty() ? std::nullopt : median_of(its);
      // log T needs T > 0; a run that starts converged carries no slope information.
      if (m && *m <= 0) m.reset();
      s.medians.push_back(m);
      if (m) {
        points.emplace_back(kappa, *m);
      } else {
        excluded += (excluded.empty() ? "" : " ") + format_double(kappa);
      }
    }
    if (points.size() >= 4) {
      s.fit = fit_exponent(points);
      if (!excluded.empty()) s.flag = "censored kappa excluded: " + excluded;
    } else {
      s.flag = "fit absent: only " + std::to_string(points.size()) + " uncensored kappa values (censored: " +
               excluded + ")";
    }
    report.summaries.push_back(std::move(s));
  }
  return report;
}

SweepReport sweep_serial(const SweepSpec& spec) {
  spec.validate();
  const auto index = enumerate(spec);
  std::vector<SweepCell> cells;
  cells.reserve(index.size());
  for (const auto& c : index) cells.push_back(run_cell(spec, c.k, c.instance, c.algorithm));
  return summarize(spec, std::move(cells));
}

SweepReport sweep(const SweepSpec& spec, int threads) {
  spec.validate();
  const auto index = enumerate(spec);
  std::vector<SweepCell> cells(index.size());
  const int n = threads > 0 ? threads : omp_get_max_threads();
  const auto count = static_cast<std::int64_t>(index.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(n)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto& c = index[static_cast<std::size_t>(i)];
    cells[static_cast<std::size_t>(i)] = run_cell(spec, c.k, c.instance, c.algorithm);
  }
  return summarize(spec, std::move(cells));
}

int threads_from_env() {
  const char* raw = std::getenv("MINIMAX_KIT_THREADS");
  if (!raw || !*raw) return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 0) {
    throw ValidationError("MINIMAX_KIT_THREADS must be a nonnegative integer, got '" + std::string(raw) + "'");
  }
  return static_cast<int>(v);
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) {
    throw ValidationError("fit_exponent: need at least 4 points, got " + std::to_string(points.size()));
  }
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [k, t] : points) {
    if (!(k > 0) || !(t > 0) || !std::isfinite(k) || !std::isfinite(t)) {
      throw ValidationError("fit_exponent: points must be positive and finite");
    }
    sx += std::log(k);
    sy += std::log(t);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [k, t] : points) {
    const double dx = std::log(k) - mx, dy = std::log(t) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0)) throw ValidationError("fit_exponent: kappa values must not all coincide");
  ExponentFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss_res = 0;
  for (const auto& [k, t] : points) {
    const double r = std::log(t) - (fit.intercept + fit.exponent * std::log(k));
    ss_res += r * r;
  }
  // A flat series is fit exactly by slope 0.
  fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<std::string>> split_csv(const std::string& text, const char* header, std::size_t width) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ValidationError("csv: header must be exactly '" + std::string(header) + "'");
  }
  std::vector<std::vector<std::string>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != width) {
      throw ValidationError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                            " fields");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::int64_t parse_int(const std::string& s) {
  KeyValueDoc d;
  d.set("v", s);
  return d.get_int("v", 0);
}

}  // namespace

std::string sweep_to_csv(const std::vector<SweepCell>& cells) {
  std::string out = kSweepHeader;
  out += '\n';
  for (const auto& c : cells) {
    out += to_string(c.algorithm) + "," + format_double(c.kappa) + "," + std::to_string(c.instance) + "," +
           std::to_string(c.iterations) + "," + (c.censored ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<SweepCell> sweep_from_csv(const std::string& text) {
  std::vector<SweepCell> cells;
  for (const auto& f : split_csv(text, kSweepHeader, 5)) {
    SweepCell c;
    c.algorithm = parse_algorithm(f[0]);
    c.kappa = parse_double(f[1]);
    c.instance = static_cast<int>(parse_int(f[2]));
    c.iterations = parse_int(f[3]);
    if (f[4] != "0" && f[4] != "1") throw ValidationError("csv: censored must be 0 or 1, got '" + f[4] + "'");
    c.censored = f[4] == "1";
    cells.push_back(c);
  }
  return cells;
}

std::string summary_to_csv(const std::vector<AlgorithmSummary>& summaries) {
  std::string out = kSummaryHeader;
  out += '\n';
  for (const auto& s : summaries) {
    out += to_string(s.algorithm);
    if (s.fit) {
      out += "," + format_double(s.fit->exponent) + "," + format_double(s.fit->intercept) + "," +
             format_double(s.fit->r2);
    } else {
      out += ",nan,nan,nan";
    }
    out += '\n';
  }
  return out;
}

std::vector<AlgorithmSummary> summary_from_csv(const std::string& text) {
  std::vector<AlgorithmSummary> out;
  for (const auto& f : split_csv(text, kSummaryHeader, 4)) {
    AlgorithmSummary s;
    s.algorithm = parse_algorithm(f[0]);
    const double e = parse_double(f[1]), i = parse_double(f[2]), r = parse_double(f[3]);
    if (std::isnan(e)) {
      s.flag = "fit absent";
    } else {
      s.fit = ExponentFit{e, i, r};
    }
    out.push_back(std::move(s));
  }
  return out;
}

AggregateBoundReport check_aggregate_bound(const RunTrace& trace, const MinimaxProblem& p,
                                           const SolverConfig& config, double lower_bound) {
  if (!is_altgdam_default(p, config)) {
    throw InapplicableError("aggregate bound: the constant 10092 holds only for prox_altgdam at the default "
                            "stepsizes and momenta");
  }
  if (trace.rows.empty()) throw ContractViolation("aggregate bound: empty trace");
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    if (trace.rows[i].t != static_cast<std::int64_t>(i)) {
      throw InapplicableError("aggregate bound: trace must hold a row for every t (diag_every = 1)");
    }
  }
  AggregateBoundReport r;
  for (const auto& row : trace.rows) {
    if (row.t >= 2) r.lhs += row.grad_map_norm * row.grad_map_norm;
  }
  const double h0 = trace.rows.front().lyapunov;
  r.rhs = kAggregateConstant * p.L() * std::pow(p.kappa(), 1.5) * (h0 - lower_bound);
  r.impossible_input = lower_bound > h0;
  if (r.impossible_input) {
    r.ratio = std::numeric_limits<double>::infinity();
    r.pass = false;
    return r;
  }
  r.ratio = r.rhs > 0 ? r.lhs / r.rhs : (r.lhs > 0 ? std::numeric_limits<double>::infinity() : 0.0);
  r.pass = r.ratio <= 1.0;
  return r;
}

}  // namespace minimax
