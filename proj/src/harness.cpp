#include "minimax/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "minimax/errors.hpp"

namespace minimax {

double lyapunov_slack(double h) { return 1e-9 * std::max(1.0, std::abs(h)); }

std::string problem_id(const MinimaxProblem& p) {
  return to_string(p.family()) + ":" + std::to_string(p.dim_x()) + "x" + std::to_string(p.dim_y()) +
         ":kappa=" + format_double(p.kappa()) + ":seed=" + std::to_string(p.seed());
}

void RunSpec::validate() const {
  if (max_iters < 1) throw ValidationError("invalid run spec: max_iters must be >= 1");
  if (!(eps > 0) || !std::isfinite(eps)) throw ValidationError("invalid run spec: eps must be > 0");
  if (diag_every < 1) throw ValidationError("invalid run spec: diag_every must be >= 1");
}

namespace {

struct Diagnostics {
  double grad_map_norm = 0.0;
  std::optional<TraceRow> row;
};

/// ||G(x_t)|| always; the full row only when requested.
Diagnostics evaluate(const MinimaxProblem& p, const SolverState& s, const SolverConfig& c, YStarOracle& oracle,
                     bool full) {
  Diagnostics d;
  const auto ys = oracle.y_star(p, s.x);
  const auto grad = p.grad1(s.x, ys);
  d.grad_map_norm = norm2(grad_mapping_from(p, s.x, grad, c.eta_x));
  if (!full) return d;
  const double g = p.g().evaluate(s.x);
  if (!std::isfinite(g)) {
    throw InfeasibleError("g(x_t) is +inf at t=" + std::to_string(s.t) + "; infinite rows cannot be traced");
  }
  const double phi = p.f(s.x, ys) - p.h().evaluate(ys);
  const double y_gap_sq = squared_distance(s.y, ys);
  const double x_step_sq = squared_distance(s.x, s.x_prev);
  TraceRow row;
  row.t = s.t;
  row.objective = phi + g;
  row.lyapunov = phi + g + 2.0 * p.mu() * y_gap_sq + (c.beta / c.eta_x) * x_step_sq;
  row.grad_map_norm = d.grad_map_norm;
  row.dx_norm = std::sqrt(x_step_sq);
  row.dy_norm = distance(s.y, s.y_prev);
  row.y_gap = std::sqrt(y_gap_sq);
  if (!std::isfinite(row.lyapunov) || !std::isfinite(row.objective)) {
    throw DivergenceError(s.t, "trace row");
  }
  d.row = row;
  return d;
}

}  // namespace

RunTrace run(const MinimaxProblem& p, const SolverConfig& config, const RunOptions& options) {
  config.validate();
  if (options.max_iters < 1) throw ValidationError("run: max_iters must be >= 1");
  if (!(options.eps > 0)) throw ValidationError("run: eps must be > 0");
  if (options.diag_every < 1) throw ValidationError("run: diag_every must be >= 1");

  YStarOracle oracle = options.oracle ? *options.oracle : default_oracle(p);
  RunTrace trace;
  auto& meta = trace.meta;
  meta.problem_id = problem_id(p);
  meta.algorithm = config.algorithm;
  meta.config = config;
  meta.seed = p.seed();
  meta.y_star_mode = oracle.mode();
  meta.max_iters = options.max_iters;
  meta.eps = options.eps;
  meta.diag_every = options.diag_every;
  meta.config_at_defaults = is_altgdam_default(p, config);
  meta.min_grad_map_norm = std::numeric_limits<double>::infinity();

  auto state = SolverState::initial(options.x0 ? *options.x0 : RealVector::zeros(p.dim_x()),
                                    options.y0 ? *options.y0 : RealVector::zeros(p.dim_y()));
  if (state.x.dim() != p.dim_x() || state.y.dim() != p.dim_y()) {
    throw ValidationError("run: initial point has wrong dimension");
  }

  std::optional<double> last_h;
  auto record = [&](const TraceRow& row) {
    if (last_h && row.lyapunov > *last_h + lyapunov_slack(*last_h)) meta.lyapunov_monotone = false;
    last_h = row.lyapunov;
    trace.rows.push_back(row);
  };

  try {
    auto d = evaluate(p, state, config, oracle, true);
    meta.min_grad_map_norm = d.grad_map_norm;
    record(*d.row);
    if (d.grad_map_norm <= options.eps) meta.eps_reached_at = 0;

    while (!meta.eps_reached_at && state.t < options.max_iters) {
      state = step(p, state, config);
      meta.iterations = state.t;
      const bool on_stride = state.t % options.diag_every == 0;
      const bool last = state.t == options.max_iters;
      d = evaluate(p, state, config, oracle, on_stride || last);
      meta.min_grad_map_norm = std::min(meta.min_grad_map_norm, d.grad_map_norm);
      if (meta.min_grad_map_norm <= options.eps) {
        meta.eps_reached_at = state.t;
        if (!d.row) d = evaluate(p, state, config, oracle, true);
      }
      if (d.row) record(*d.row);
    }
  } catch (const DivergenceError& e) {
    meta.error = e.what();
  } catch (const NonconvergenceError& e) {
    meta.error = e.what();
  } catch (const InfeasibleError& e) {
    meta.error = e.what();
  } catch (const NonFiniteValue& e) {
    meta.error = std::string("divergence: ") + e.what();
  }
  return trace;
}

ResolvedRun resolve(const RunSpec& spec) {
  spec.validate();
  ResolvedRun r;
  if (const auto* ps = std::get_if<ProblemSpec>(&spec.problem)) {
    auto copy = *ps;
    copy.seed = spec.seed;
    r.problem = generate(copy);
  } else {
    r.problem = read_problem_file(std::get<std::string>(spec.problem));
  }
  r.config = default_config(*r.problem, spec.algorithm);
  if (spec.overrides.eta_x) r.config.eta_x = *spec.overrides.eta_x;
  if (spec.overrides.eta_y) r.config.eta_y = *spec.overrides.eta_y;
  if (spec.overrides.beta) r.config.beta = *spec.overrides.beta;
  if (spec.overrides.gamma) r.config.gamma = *spec.overrides.gamma;
  r.config.validate();
  r.options.max_iters = spec.max_iters;
  r.options.eps = spec.eps;
  r.options.diag_every = spec.diag_every;
  r.options.x0 = RealVector::filled(r.problem->dim_x(), spec.x0_fill);
  r.options.y0 = RealVector::filled(r.problem->dim_y(), spec.y0_fill);
  return r;
}

RunTrace run(const RunSpec& spec) {
  const auto r = resolve(spec);
  return run(*r.problem, r.config, r.options);
}

std::optional<std::int64_t> iterations_to_eps(const RunTrace& trace, double eps) {
  if (trace.rows.empty()) throw ContractViolation("iterations_to_eps: empty trace");
  for (const auto& row : trace.rows) {
    if (row.grad_map_norm <= eps) return row.t;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::string trace_to_csv(const std::vector<TraceRow>& rows) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.t);
    for (double v : {r.lyapunov, r.objective, r.grad_map_norm, r.dx_norm, r.dy_norm, r.y_gap}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<TraceRow> trace_from_csv(const std::string& text) {
  std::vector<TraceRow> rows;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw ValidationError("trace csv: header must be exactly '" + std::string(kTraceHeader) + "'");
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      throw ValidationError("trace csv line " + std::to_string(line_no) + ": expected 7 fields");
    }
    TraceRow r;
    const auto& ts = fields[0];
    auto res = std::from_chars(ts.data(), ts.data() + ts.size(), r.t);
    if (res.ec != std::errc() || res.ptr != ts.data() + ts.size()) {
      throw ValidationError("trace csv line " + std::to_string(line_no) + ": bad t '" + ts + "'");
    }
    r.lyapunov = parse_double(fields[1]);
    r.objective = parse_double(fields[2]);
    r.grad_map_norm = parse_double(fields[3]);
    r.dx_norm = parse_double(fields[4]);
    r.dy_norm = parse_double(fields[5]);
    r.y_gap = parse_double(fields[6]);
    rows.push_back(r);
  }
  return rows;
}

KeyValueDoc meta_to_document(const RunMeta& m) {
  KeyValueDoc doc;
  doc.set("problem.id", m.problem_id);
  doc.set("algorithm", to_string(m.algorithm));
  doc.set("config.eta_x", format_double(m.config.eta_x));
  doc.set("config.eta_y", format_double(m.config.eta_y));
  doc.set("config.beta", format_double(m.config.beta));
  doc.set("config.gamma", format_double(m.config.gamma));
  doc.set("seed", std::to_string(m.seed));
  doc.set("y_star_mode", to_string(m.y_star_mode));
  doc.set("max_iters", std::to_string(m.max_iters));
  doc.set("eps", format_double(m.eps));
  doc.set("diag_every", std::to_string(m.diag_every));
  doc.set("iterations", std::to_string(m.iterations));
  doc.set("eps_reached_at", m.eps_reached_at ? std::to_string(*m.eps_reached_at) : "none");
  doc.set("min_grad_map_norm", format_double(m.min_grad_map_norm));
  doc.set("lyapunov_monotone", m.lyapunov_monotone ? "true" : "false");
  doc.set("config_at_defaults", m.config_at_defaults ? "true" : "false");
  doc.set("error", m.error);
  return doc;
}

RunMeta meta_from_document(const KeyValueDoc& doc) {
  RunMeta m;
  m.problem_id = doc.require("problem.id");
  m.algorithm = parse_algorithm(doc.require("algorithm"));
  m.config.algorithm = m.algorithm;
  m.config.eta_x = doc.require_double("config.eta_x");
  m.config.eta_y = doc.require_double("config.eta_y");
  m.config.beta = doc.require_double("config.beta");
  m.config.gamma = doc.require_double("config.gamma");
  m.seed = doc.get_u64("seed", 0);
  const auto mode = doc.require("y_star_mode");
  if (mode != "closed_form" && mode != "iterative") throw ValidationError("meta: bad y_star_mode '" + mode + "'");
  m.y_star_mode = mode == "closed_form" ? YStarMode::closed_form : YStarMode::iterative;
  m.max_iters = doc.get_int("max_iters", 0);
  m.eps = doc.require_double("eps");
  m.diag_every = doc.get_int("diag_every", 1);
  m.iterations = doc.get_int("iterations", 0);
  const auto reached = doc.require("eps_reached_at");
  if (reached != "none") m.eps_reached_at = doc.get_int("eps_reached_at", 0);
  m.min_grad_map_norm = doc.require_double("min_grad_map_norm");
  m.lyapunov_monotone = doc.get_bool("lyapunov_monotone", true);
  m.config_at_defaults = doc.get_bool("config_at_defaults", false);
  m.error = doc.get("error").value_or("");
  return m;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace minimax
