#include "minimax/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "minimax/errors.hpp"
#include "minimax/prox.hpp"

namespace minimax::cli {

namespace fs = std::filesystem;

namespace {

std::vector<KeyInfo> problem_keys(bool with_kappa) {
  std::vector<KeyInfo> k = {
      {"problem.family", "quad_coupled", "quad_coupled or sparse_adversarial"},
      {"problem.dim_x", "4", "dimension of x"},
      {"problem.dim_y", "4", "dimension of y"},
  };
  if (with_kappa) k.push_back({"problem.kappa_target", "16", "condition number L/mu of the generated problem"});
  const std::vector<KeyInfo> rest = {
      {"problem.mu", "1", "strong-concavity modulus"},
      {"problem.g.kind", "zero", "regularizer on x: zero, l1, sq_l2, box"},
      {"problem.g.weight", "0", "weight of an l1 or sq_l2 g"},
      {"problem.g.lo", "-1", "lower bound of a box g"},
      {"problem.g.hi", "1", "upper bound of a box g"},
      {"problem.h.weight", "0.1", "l1 weight of h (sparse_adversarial only)"},
      {"problem.b_scale", "1", "b drawn from [-b_scale, b_scale]"},
  };
  k.insert(k.end(), rest.begin(), rest.end());
  return k;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Wraps a parser so its errors name the offending key.
template <class Fn>
auto field(const KeyValueDoc& doc, const std::string& key, Fn&& fn) {
  const auto value = doc.require(key);
  try {
    return fn(value);
  } catch (const ValidationError& e) {
    const auto* entry = doc.find(key);
    std::string where = entry && entry->line > 0 ? "line " + std::to_string(entry->line) + ": " : "";
    throw ValidationError(where + "field '" + key + "': " + e.what());
  }
}

std::optional<double> optional_double(const KeyValueDoc& doc, const std::string& key) {
  if (doc.require(key) == "default") return std::nullopt;
  return doc.require_double(key);
}

std::size_t positive_size(const KeyValueDoc& doc, const std::string& key) {
  const auto v = doc.get_int(key, 0);
  if (v < 1) throw ValidationError("field '" + key + "': must be >= 1");
  return static_cast<std::size_t>(v);
}

int positive_int(const KeyValueDoc& doc, const std::string& key) {
  const auto v = doc.get_int(key, 0);
  if (v < 1 || v > std::numeric_limits<int>::max()) throw ValidationError("field '" + key + "': must be >= 1");
  return static_cast<int>(v);
}

ProblemSpec problem_spec_from(const KeyValueDoc& doc, bool with_kappa) {
  ProblemSpec ps;
  ps.family = field(doc, "problem.family", [](const std::string& s) { return parse_family(s); });
  ps.dim_x = positive_size(doc, "problem.dim_x");
  ps.dim_y = positive_size(doc, "problem.dim_y");
  if (with_kappa) ps.kappa_target = doc.require_double("problem.kappa_target");
  ps.mu = doc.require_double("problem.mu");
  ps.g_kind = field(doc, "problem.g.kind", [](const std::string& s) { return parse_prox_kind(s); });
  ps.g_weight = doc.require_double("problem.g.weight");
  ps.g_lo = doc.require_double("problem.g.lo");
  ps.g_hi = doc.require_double("problem.g.hi");
  ps.h_weight = doc.require_double("problem.h.weight");
  ps.b_scale = doc.require_double("problem.b_scale");
  return ps;
}

std::string help_footer(const std::vector<KeyInfo>& keys) {
  std::size_t width = 0;
  for (const auto& k : keys) width = std::max(width, k.key.size() + k.fallback.size() + 3);
  std::string out = "Config keys (key=value lines; set with --config or --set):\n";
  for (const auto& k : keys) {
    auto entry = k.key + " = " + k.fallback;
    entry.resize(width + 2, ' ');
    out += "  " + entry + k.help + "\n";
  }
  out += "\nExit codes: 0 success, 1 usage or config error, 2 not converged, 3 invariant failure.\n";
  return out;
}

fs::path prepare_out(const std::string& dir) {
  fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir + "': " + ec.message());
  return out;
}

}  // namespace

const std::vector<KeyInfo>& run_keys() {
  static const std::vector<KeyInfo> keys = [] {
    std::vector<KeyInfo> k = {{"problem.file", "", "serialized problem to load instead of generating one"}};
    for (auto& p : problem_keys(true)) k.push_back(p);
    const std::vector<KeyInfo> rest = {
        {"algorithm", "prox_altgdam", "prox_gda, prox_altgda or prox_altgdam"},
        {"solver.eta_x", "default", "x stepsize; default is the algorithm's bound"},
        {"solver.eta_y", "default", "y stepsize; default 1/L"},
        {"solver.beta", "default", "heavy-ball momentum (prox_altgdam only)"},
        {"solver.gamma", "default", "Nesterov momentum (prox_altgdam only)"},
        {"max_iters", "100000", "iteration cap"},
        {"eps", "1e-6", "target on the gradient-mapping norm"},
        {"diag_every", "1", "stride between trace rows"},
        {"seed", "0", "problem generator seed"},
        {"x0", "0", "every entry of the initial x"},
        {"y0", "0", "every entry of the initial y"},
    };
    k.insert(k.end(), rest.begin(), rest.end());
    return k;
  }();
  return keys;
}

const std::vector<KeyInfo>& sweep_keys() {
  static const std::vector<KeyInfo> keys = [] {
    std::vector<KeyInfo> k = {
        {"kappa_grid", "2,4,8,16,32,64", "condition numbers, increasing, >= 4 points over a decade"},
        {"eps", "1e-4", "target on the gradient-mapping norm"},
        {"problems_per_kappa", "3", "instances per condition number"},
        {"algorithms", "prox_altgdam,prox_gda", "algorithms to compare"},
        {"max_iters", "10000000", "runs not at eps by this cap are censored"},
        {"seed", "0", "sweep seed"},
    };
    for (auto& p : problem_keys(false)) k.push_back(p);
    return k;
  }();
  return keys;
}

const std::vector<KeyInfo>& verify_keys() {
  static const std::vector<KeyInfo> keys = {
      {"scope", "prox,regularity,lyapunov,bound", "suites to run"},
      {"seed", "0", "instance seed"},
      {"families", "quad_coupled,sparse_adversarial", "problem families"},
      {"kappas", "4,16,64", "condition numbers, cycled over instances"},
      {"instances", "20", "instances per family"},
      {"dims", "2,5,10,20,50", "instance dimensions, cycled"},
      {"sparse_g_weight", "0.1", "l1 weight of g on sparse_adversarial instances"},
      {"prox_trials", "1000", "random trials per prox operator"},
      {"lipschitz_pairs", "500", "random pairs per instance for Lipschitz checks"},
      {"fd_points", "100", "finite-difference points per instance"},
      {"oracle_points", "100", "closed-form vs iterative y* points per instance"},
      {"rate_kappas", "4,64", "condition numbers for the inner-solver rate fit"},
      {"lyapunov_iters", "2000", "iterations per Lyapunov run"},
      {"eta_x_scale", "1", "multiplier on the default prox_altgdam eta_x (lyapunov suite)"},
      {"eta_x", "default", "absolute eta_x for the lyapunov suite; overrides eta_x_scale"},
      {"bound_eps", "1e-8", "eps of the converged runs in the bound suite"},
      {"bound_max_iters", "2000000", "iteration cap of the bound-suite runs"},
  };
  return keys;
}

const std::vector<KeyInfo>& prox_check_keys() {
  static const std::vector<KeyInfo> keys = {
      {"kind", "l1", "zero, l1, sq_l2 or box"},
      {"weight", "1", "weight of l1 or sq_l2"},
      {"lo", "-1", "box lower bound"},
      {"hi", "1", "box upper bound"},
      {"step", "1", "prox step"},
      {"v", "3,-0.5,0", "point to evaluate"},
      {"w", "", "second point for the (firm) nonexpansiveness checks"},
      {"u", "", "competitor for the optimality check"},
  };
  return keys;
}

KeyValueDoc load_config(const std::vector<KeyInfo>& keys, const std::optional<std::string>& path,
                        const std::vector<std::string>& overrides, const std::optional<std::uint64_t>& seed) {
  KeyValueDoc doc = path ? KeyValueDoc::read_file(*path) : KeyValueDoc{};
  for (const auto& o : overrides) doc.apply_override(o);
  if (seed) doc.set("seed", std::to_string(*seed));

  std::vector<std::string> names;
  for (const auto& k : keys) names.push_back(k.key);
  for (const auto& e : doc.entries()) {
    if (std::find(names.begin(), names.end(), e.key) == names.end()) {
      std::string where = path && e.line > 0 ? *path + ":" + std::to_string(e.line) + ": " : "";
      throw ValidationError(where + "unknown key '" + e.key + "' (did you mean '" + nearest_key(e.key, names) + "'?)");
    }
  }
  KeyValueDoc resolved = path ? KeyValueDoc::parse("", *path) : KeyValueDoc{};
  for (const auto& k : keys) {
    const auto* e = doc.find(k.key);
    resolved.set(k.key, e ? e->value : k.fallback, e ? e->line : 0);
  }
  return resolved;
}

RunSpec run_spec_from(const KeyValueDoc& doc) {
  RunSpec spec;
  const auto file = doc.require("problem.file");
  if (file.empty()) {
    spec.problem = problem_spec_from(doc, true);
  } else {
    spec.problem = file;
  }
  spec.algorithm = field(doc, "algorithm", [](const std::string& s) { return parse_algorithm(s); });
  spec.overrides.eta_x = optional_double(doc, "solver.eta_x");
  spec.overrides.eta_y = optional_double(doc, "solver.eta_y");
  spec.overrides.beta = optional_double(doc, "solver.beta");
  spec.overrides.gamma = optional_double(doc, "solver.gamma");
  spec.max_iters = doc.get_int("max_iters", 0);
  spec.eps = doc.require_double("eps");
  spec.diag_every = doc.get_int("diag_every", 0);
  spec.seed = doc.get_u64("seed", 0);
  spec.x0_fill = doc.require_double("x0");
  spec.y0_fill = doc.require_double("y0");
  spec.validate();
  return spec;
}

SweepSpec sweep_spec_from(const KeyValueDoc& doc) {
  SweepSpec spec;
  spec.kappa_grid = field(doc, "kappa_grid", [](const std::string& s) { return parse_double_list(s); });
  spec.eps = doc.require_double("eps");
  spec.problems_per_kappa = positive_int(doc, "problems_per_kappa");
  spec.algorithms.clear();
  for (const auto& a : split_list(doc.require("algorithms"))) {
    spec.algorithms.push_back(field(doc, "algorithms", [&](const std::string&) { return parse_algorithm(a); }));
  }
  spec.max_iters = doc.get_int("max_iters", 0);
  spec.seed = doc.get_u64("seed", 0);
  spec.base = problem_spec_from(doc, false);
  spec.validate();
  return spec;
}

VerifySpec verify_spec_from(const KeyValueDoc& doc) {
  VerifySpec spec;
  spec.scope = split_list(doc.require("scope"));
  spec.seed = doc.get_u64("seed", 0);
  spec.families.clear();
  for (const auto& f : split_list(doc.require("families"))) {
    spec.families.push_back(field(doc, "families", [&](const std::string&) { return parse_family(f); }));
  }
  spec.kappas = field(doc, "kappas", [](const std::string& s) { return parse_double_list(s); });
  spec.instances = positive_int(doc, "instances");
  spec.dims.clear();
  for (const auto& d : split_list(doc.require("dims"))) {
    KeyValueDoc one;
    one.set("dims", d);
    const auto v = one.get_int("dims", 0);
    if (v < 1) throw ValidationError("field 'dims': entries must be >= 1");
    spec.dims.push_back(static_cast<std::size_t>(v));
  }
  spec.sparse_g_weight = doc.require_double("sparse_g_weight");
  spec.prox_trials = positive_int(doc, "prox_trials");
  spec.lipschitz_pairs = positive_int(doc, "lipschitz_pairs");
  spec.fd_points = positive_int(doc, "fd_points");
  spec.oracle_points = positive_int(doc, "oracle_points");
  spec.rate_kappas = field(doc, "rate_kappas", [](const std::string& s) { return parse_double_list(s); });
  spec.lyapunov_iters = positive_int(doc, "lyapunov_iters");
  spec.eta_x_scale = doc.require_double("eta_x_scale");
  spec.eta_x = optional_double(doc, "eta_x");
  spec.bound_eps = doc.require_double("bound_eps");
  spec.bound_max_iters = doc.get_int("bound_max_iters", 0);
  spec.validate();
  return spec;
}

namespace {

struct Common {
  std::optional<std::string> config;
  std::string out = "out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const Common& c) {
  const auto doc = load_config(run_keys(), c.config, c.overrides, c.seed);
  const auto spec = run_spec_from(doc);
  const auto resolved = resolve(spec);
  const auto out = prepare_out(c.out);
  const auto trace = run(*resolved.problem, resolved.config, resolved.options);
  write_text_file((out / "trace.csv").string(), trace_to_csv(trace.rows));
  meta_to_document(trace.meta).write_file((out / "meta.txt").string());
  resolved.problem->to_document().write_file((out / "problem.txt").string());

  const auto& m = trace.meta;
  std::cout << to_string(m.algorithm) << " iterations=" << m.iterations
            << " min_grad_map_norm=" << format_double(m.min_grad_map_norm)
            << " H: " << format_double(trace.rows.front().lyapunov) << " -> "
            << format_double(trace.rows.back().lyapunov) << "\n";
  if (!m.error.empty()) {
    std::cerr << "error: " << m.error << "\n";
    return kUsage;
  }
  if (!m.eps_reached_at) {
    std::cerr << "not converged: eps=" << format_double(m.eps) << " not reached in " << m.max_iters
              << " iterations\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_sweep(const Common& c) {
  const auto doc = load_config(sweep_keys(), c.config, c.overrides, c.seed);
  const auto spec = sweep_spec_from(doc);
  const auto out = prepare_out(c.out);
  const auto report = sweep(spec, threads_from_env());
  write_text_file((out / "sweep.csv").string(), sweep_to_csv(report.cells));
  write_text_file((out / "summary.csv").string(), summary_to_csv(report.summaries));
  doc.write_file((out / "sweep_meta.txt").string());
  for (const auto& s : report.summaries) {
    std::cout << to_string(s.algorithm);
    if (s.fit) {
      std::cout << " exponent=" << format_double(s.fit->exponent) << " r2=" << format_double(s.fit->r2);
    }
    if (!s.flag.empty()) std::cout << " [" << s.flag << "]";
    std::cout << "\n";
  }
  return kOk;
}

int cmd_verify(const Common& c) {
  const auto doc = load_config(verify_keys(), c.config, c.overrides, c.seed);
  const auto spec = verify_spec_from(doc);
  const auto report = verify(spec);
  bool wrote = false;
  for (const auto& check : report.checks) {
    std::cout << (check.pass ? "PASS " : "FAIL ") << check.name << " worst_margin=" << format_double(check.worst_margin)
              << " (" << check.detail << ")\n";
    if (check.pass || wrote) continue;
    // The first failure is kept for replay through `run` or `prox-check`.
    const auto out = prepare_out(c.out);
    if (check.problem) {
      write_problem_file(*check.problem, (out / "failing_problem.txt").string());
      KeyValueDoc replay;
      replay.set("problem.file", (out / "failing_problem.txt").string());
      const auto cfg = check.config.value_or(default_config(*check.problem, Algorithm::prox_altgdam));
      replay.set("algorithm", to_string(cfg.algorithm));
      replay.set("solver.eta_x", cfg.eta_x);
      replay.set("solver.eta_y", cfg.eta_y);
      replay.set("solver.beta", cfg.beta);
      replay.set("solver.gamma", cfg.gamma);
      if (check.name.rfind("bound.", 0) == 0) {
        replay.set("max_iters", std::to_string(spec.bound_max_iters));
        replay.set("eps", spec.bound_eps);
      } else {
        replay.set("max_iters", std::to_string(spec.lyapunov_iters));
      }
      replay.write_file((out / "failing_run.txt").string());
    }
    if (check.prox_case) check.prox_case->write_file((out / "failing_prox_case.txt").string());
    KeyValueDoc failure;
    failure.set("check", check.name);
    failure.set("worst_margin", check.worst_margin);
    failure.set("detail", check.detail);
    failure.write_file((out / "failure.txt").string());
    wrote = true;
  }
  return report.all_pass() ? kOk : kInvariantFailure;
}

int cmd_prox_check(const Common& c) {
  const auto doc = load_config(prox_check_keys(), c.config, c.overrides, std::nullopt);
  const auto kind = field(doc, "kind", [](const std::string& s) { return parse_prox_kind(s); });
  ProxOperator op;
  switch (kind) {
    case ProxKind::zero: op = ProxOperator::zero(); break;
    case ProxKind::l1: op = ProxOperator::l1(doc.require_double("weight")); break;
    case ProxKind::sq_l2: op = ProxOperator::sq_l2(doc.require_double("weight")); break;
    case ProxKind::box:
      try {
        op = ProxOperator::box(doc.require_double("lo"), doc.require_double("hi"));
      } catch (const ContractViolation& e) {
        throw ValidationError(e.what());
      }
      break;
  }
  const double step = doc.require_double("step");
  if (!(step > 0)) throw ValidationError("field 'step': must be > 0");
  const auto v = field(doc, "v", [](const std::string& s) { return parse_vector(s); });
  const auto pv = op.prox(v, step);
  std::cout << "prox=" << format_vector(pv) << " r(v)=" << format_double(op.evaluate(v))
            << " r(prox)=" << format_double(op.evaluate(pv)) << "\n";

  constexpr double kSlack = 1e-12;
  bool ok = true;
  auto report = [&](const std::string& name, double margin) {
    std::cout << (margin >= 0 ? "PASS " : "FAIL ") << name << " margin=" << format_double(margin) << "\n";
    ok = ok && margin >= 0;
  };
  if (!doc.require("w").empty()) {
    const auto w = field(doc, "w", [](const std::string& s) { return parse_vector(s); });
    if (w.dim() != v.dim()) throw ValidationError("field 'w': dimension differs from v");
    const auto dp = sub(pv, op.prox(w, step)), dv = sub(v, w);
    report("nonexpansive", norm2(dv) + kSlack - norm2(dp));
    report("firm_nonexpansive", dot(dp, dv) + kSlack - dot(dp, dp));
  }
  if (!doc.require("u").empty()) {
    const auto u = field(doc, "u", [](const std::string& s) { return parse_vector(s); });
    if (u.dim() != v.dim()) throw ValidationError("field 'u': dimension differs from v");
    auto obj = [&](const RealVector& z) { return op.evaluate(z) + squared_distance(z, v) / (2 * step); };
    const double best = obj(pv);
    report("optimality", obj(u) + kSlack * std::max(1.0, std::abs(best)) - best);
  }
  return ok ? kOk : kInvariantFailure;
}

}  // namespace

int main(int argc, const char* const* argv) {
  CLI::App app{"Regularized nonconvex-strongly-concave minimax solvers and checks", "minimax-kit"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 1 usage or config error, 2 not converged, 3 invariant failure.\n"
             "MINIMAX_KIT_THREADS caps sweep parallelism (0 = auto).");

  Common common;
  auto add = [&](const std::string& name, const std::string& about, const std::vector<KeyInfo>& keys, bool seeded) {
    auto* sub = app.add_subcommand(name, about);
    sub->add_option("--config", common.config, "key=value config document");
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
    sub->add_option("--set", common.overrides, "override a config key (key=value, repeatable)");
    if (seeded) sub->add_option("--seed", common.seed, "seed (overrides the seed key)");
    sub->footer(help_footer(keys));
    return sub;
  };
  auto* run_cmd = add("run", "Run one solver and write trace.csv, meta.txt, problem.txt", run_keys(), true);
  auto* sweep_cmd = add("sweep", "Condition-number sweep; writes sweep.csv, summary.csv", sweep_keys(), true);
  auto* verify_cmd = add("verify", "Run invariant suites on seeded instances", verify_keys(), true);
  auto* prox_cmd = add("prox-check", "Evaluate a prox operator and check its properties", prox_check_keys(), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(common);
    if (sweep_cmd->parsed()) return cmd_sweep(common);
    if (verify_cmd->parsed()) return cmd_verify(common);
    if (prox_cmd->parsed()) return cmd_prox_check(common);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InapplicableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace minimax::cli
