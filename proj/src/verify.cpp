#include "minimax/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "minimax/complexity.hpp"
#include "minimax/errors.hpp"
#include "minimax/harness.hpp"
#include "minimax/oracles.hpp"

namespace minimax {

void VerifySpec::validate() const {
  auto bad = [](const std::string& what) { throw ValidationError("invalid verify spec: " + what); };
  if (scope.empty()) bad("scope must name at least one of prox, regularity, lyapunov, bound");
  for (const auto& s : scope) {
    if (std::find(kVerifyScopes.begin(), kVerifyScopes.end(), s) == kVerifyScopes.end()) {
      bad("unknown scope '" + s + "' (did you mean '" + nearest_key(s, kVerifyScopes) + "'?)");
    }
  }
  if (families.empty()) bad("families must not be empty");
  if (kappas.empty()) bad("kappas must not be empty");
  for (double k : kappas) {
    if (!(k >= 1) || !std::isfinite(k)) bad("kappas must be >= 1");
  }
  if (instances < 1) bad("instances must be >= 1");
  if (dims.empty()) bad("dims must not be empty");
  for (auto d : dims) {
    if (d < 1) bad("dims must be >= 1");
  }
  if (!(sparse_g_weight >= 0)) bad("sparse_g_weight must be >= 0");
  if (prox_trials < 1 || lipschitz_pairs < 1 || fd_points < 1 || oracle_points < 1) bad("trial counts must be >= 1");
  if (lyapunov_iters < 1) bad("lyapunov_iters must be >= 1");
  if (!(eta_x_scale > 0)) bad("eta_x_scale must be > 0");
  if (eta_x && !(*eta_x > 0)) bad("eta_x must be > 0");
  if (!(bound_eps > 0)) bad("bound_eps must be > 0");
  if (bound_max_iters < 1) bad("bound_max_iters must be >= 1");
}

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const CheckResult* VerifyReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ProblemPtr verify_instance(const VerifySpec& spec, Family family, int i) {
  ProblemSpec ps;
  ps.family = family;
  ps.kappa_target = spec.kappas[static_cast<std::size_t>(i) % spec.kappas.size()];
  const auto d = spec.dims[(static_cast<std::size_t>(i) / spec.kappas.size()) % spec.dims.size()];
  ps.dim_x = d + (i % 3 == 2 ? 1 : 0);
  ps.dim_y = d + (i % 3 == 1 ? 1 : 0);
  if (family == Family::sparse_adversarial) {
    ps.g_kind = ProxKind::l1;
    ps.g_weight = spec.sparse_g_weight;
  }
  ps.seed = mix_seed(spec.seed, static_cast<std::uint64_t>(family) * 1'000'003ULL + static_cast<std::uint64_t>(i));
  return generate(ps);
}

namespace {

/// Accumulates margins for one named check and remembers the first failure.
class Tracker {
 public:
  explicit Tracker(std::string name) {
    r_.name = std::move(name);
    r_.worst_margin = std::numeric_limits<double>::infinity();
  }

  /// Returns true on the first failure so the caller can attach replay data.
  bool observe(double margin, const std::function<std::string()>& describe) {
    ++r_.trials;
    r_.worst_margin = std::min(r_.worst_margin, margin);
    if (margin >= 0) return false;
    ++r_.failures;
    if (r_.pass) {
      r_.pass = false;
      r_.detail = describe();
      return true;
    }
    return false;
  }

  void fail(const std::string& what) {
    ++r_.trials;
    ++r_.failures;
    r_.worst_margin = -std::numeric_limits<double>::infinity();
    if (r_.pass) {
      r_.pass = false;
      r_.detail = what;
    }
  }

  CheckResult& result() { return r_; }

  CheckResult finish() {
    if (r_.trials == 0) r_.worst_margin = 0;
    if (r_.pass) r_.detail = std::to_string(r_.trials) + " trials";
    else r_.detail = std::to_string(r_.failures) + "/" + std::to_string(r_.trials) + " failed; first: " + r_.detail;
    return r_;
  }

 private:
  CheckResult r_;
};

std::vector<ProblemPtr> all_instances(const VerifySpec& spec) {
  std::vector<ProblemPtr> out;
  for (auto fam : spec.families) {
    for (int i = 0; i < spec.instances; ++i) out.push_back(verify_instance(spec, fam, i));
  }
  return out;
}

std::string where(const MinimaxProblem& p) { return problem_id(p); }

// ---------------------------------------------------------------------------

struct ProxCase {
  ProxOperator op;
  double step;
  RealVector v;
  RealVector w;
};

KeyValueDoc prox_case_doc(const ProxCase& c) {
  KeyValueDoc d;
  d.set("kind", to_string(c.op.kind()));
  d.set("weight", c.op.weight());
  d.set("lo", c.op.lo());
  d.set("hi", c.op.hi());
  d.set("step", c.step);
  d.set("v", format_vector(c.v));
  d.set("w", format_vector(c.w));
  return d;
}

ProxOperator random_operator(ProxKind kind, Rng& rng) {
  switch (kind) {
    case ProxKind::zero: return ProxOperator::zero();
    case ProxKind::l1: return ProxOperator::l1(rng.uniform(0, 5));
    case ProxKind::sq_l2: return ProxOperator::sq_l2(rng.uniform(0, 5));
    case ProxKind::box: {
      const double a = rng.uniform(-5, 5), b = rng.uniform(-5, 5);
      return ProxOperator::box(std::min(a, b), std::max(a, b));
    }
  }
  return ProxOperator::zero();
}

}  // namespace

std::vector<CheckResult> verify_prox(const VerifySpec& spec) {
  constexpr double kSlack = 1e-12;
  std::vector<CheckResult> out;
  Rng rng(mix_seed(spec.seed, 0x70726f78));
  for (auto kind : {ProxKind::zero, ProxKind::l1, ProxKind::sq_l2, ProxKind::box}) {
    const std::string base = "prox." + to_string(kind) + ".";
    Tracker nonexp(base + "nonexpansive"), firm(base + "firm_nonexpansive"), optimal(base + "optimality");
    for (int trial = 0; trial < spec.prox_trials; ++trial) {
      const auto dim = static_cast<std::size_t>(1 + rng.next_u64() % 10);
      ProxCase c{random_operator(kind, rng), std::exp(rng.uniform(std::log(1e-3), std::log(10.0))),
                 rng.uniform_vector(dim, -10, 10), rng.uniform_vector(dim, -10, 10)};
      const auto pv = c.op.prox(c.v, c.step), pw = c.op.prox(c.w, c.step);
      const auto dp = sub(pv, pw), dv = sub(c.v, c.w);
      auto describe = [&] { return to_string(kind) + " trial " + std::to_string(trial); };

      if (nonexp.observe(norm2(dv) + kSlack - norm2(dp), describe)) nonexp.result().prox_case = prox_case_doc(c);
      if (firm.observe(dot(dp, dv) + kSlack - dot(dp, dp), describe)) firm.result().prox_case = prox_case_doc(c);

      // The prox value must beat a random feasible competitor u = prox(v) + delta.
      auto objective = [&](const RealVector& u) { return c.op.evaluate(u) + squared_distance(u, c.v) / (2 * c.step); };
      auto delta = rng.uniform_vector(dim, -1, 1);
      if (trial % 4 == 0) delta = scale(1e-6, delta);
      auto u = add(pv, delta);
      if (kind == ProxKind::box) u = prox_box(u, 1.0, c.op.lo(), c.op.hi());
      const double best = objective(pv);
      const double other = objective(u);
      // Relative slack: objective values grow like ||v||^2 / step.
      const double slack = kSlack * std::max(1.0, std::abs(best));
      if (optimal.observe(other + slack - best, describe)) {
        auto doc = prox_case_doc(c);
        doc.set("u", format_vector(u));
        optimal.result().prox_case = doc;
      }
    }
    out.push_back(nonexp.finish());
    out.push_back(firm.finish());
    out.push_back(optimal.finish());
  }

  // Fixed points: 0 for l1 and interior points of a box.
  Tracker fixed("prox.fixed_point");
  for (int trial = 0; trial < spec.prox_trials; ++trial) {
    const auto dim = static_cast<std::size_t>(1 + rng.next_u64() % 10);
    const double step = rng.uniform(1e-3, 10);
    const auto l1 = ProxOperator::l1(rng.uniform(0, 5));
    const auto zero = RealVector::zeros(dim);
    fixed.observe(-max_abs(sub(l1.prox(zero, step), zero)), [&] { return "l1 at 0"; });
    const auto box = ProxOperator::box(-2, 3);
    const auto inside = rng.uniform_vector(dim, -2, 3);
    fixed.observe(-max_abs(sub(box.prox(inside, step), inside)), [&] { return "box interior"; });
  }
  out.push_back(fixed.finish());
  return out;
}

// ---------------------------------------------------------------------------

double inner_rate_constant(const MinimaxProblem& p, const RealVector& x, int max_iters) {
  const auto exact = p.closed_form_y_star(x);
  if (!exact) throw ContractViolation("inner_rate_constant: needs a closed-form y*");
  const double rho = 1.0 - 1.0 / std::sqrt(p.kappa());
  const double momentum = nesterov_momentum(p.kappa());
  const double floor = 1e-11 * std::max(1.0, norm2(*exact));
  auto y = RealVector::zeros(p.dim_y());
  auto y_prev = y;
  const double e0 = distance(y, *exact);
  if (e0 <= floor) return 0.0;
  double c = 0.0;
  for (int k = 1; k <= max_iters; ++k) {
    auto next = nesterov_ascent_step(p, x, y, y_prev, momentum);
    y_prev = std::move(y);
    y = std::move(next);
    const double e = distance(y, *exact);
    if (e <= floor) break;
    if (k >= 50) c = std::max(c, e / (std::pow(rho, 0.5 * k) * e0));
  }
  return c;
}

std::vector<CheckResult> verify_regularity(const VerifySpec& spec) {
  constexpr double kMult = 1.0 + 1e-9;
  Tracker smooth("regularity.smoothness"), concave("regularity.strong_concavity"),
      ylip("regularity.ystar_lipschitz"), philip("regularity.phi_smoothness"), fd("regularity.fd_gradient"),
      equiv("regularity.oracle_equivalence"), gmap("regularity.grad_mapping_modes"), rate("regularity.inner_rate");

  for (const auto& p : all_instances(spec)) {
    Rng rng(mix_seed(p->seed(), 0x726567));
    YStarOracle closed = default_oracle(*p);
    YStarOracle iterative(YStarMode::iterative);
    const double kappa = p->kappa(), L = p->L();
    auto attach = [&](Tracker& t) { t.result().problem = p; };

    const auto sm = check_smoothness(*p, rng, spec.lipschitz_pairs);
    if (smooth.observe(1.0 + 1e-9 - sm.max_grad_ratio, [&] { return where(*p) + ": " + sm.violation; })) attach(smooth);
    if (concave.observe(sm.min_concavity / p->mu() - (1.0 - 1e-9), [&] { return where(*p) + ": " + sm.violation; })) {
      attach(concave);
    }

    for (int i = 0; i < spec.lipschitz_pairs; ++i) {
      const auto x1 = rng.uniform_vector(p->dim_x(), -10, 10);
      const auto x2 = rng.uniform_vector(p->dim_x(), -10, 10);
      const double dx = distance(x1, x2);
      if (dx == 0) continue;
      const double ry = distance(closed.y_star(*p, x1), closed.y_star(*p, x2)) / (kappa * dx);
      if (ylip.observe(kMult - ry, [&] { return where(*p) + " ratio " + format_double(ry); })) attach(ylip);
      const double rg = distance(grad_phi(*p, x1, closed), grad_phi(*p, x2, closed)) / (L * (1 + kappa) * dx);
      if (philip.observe(kMult - rg, [&] { return where(*p) + " ratio " + format_double(rg); })) attach(philip);
    }

    for (int i = 0; i < spec.fd_points; ++i) {
      const auto x = rng.uniform_vector(p->dim_x(), -10, 10);
      const auto g = grad_phi(*p, x, closed);
      const auto approx = finite_difference_grad_phi(*p, x, closed);
      const double err = distance(g, approx) / std::max(1.0, norm2(g));
      if (fd.observe(1e-5 - err, [&] { return where(*p) + " rel err " + format_double(err); })) attach(fd);
    }

    const double eta = default_config(*p, Algorithm::prox_altgdam).eta_x;
    for (int i = 0; i < spec.oracle_points; ++i) {
      const auto x = rng.uniform_vector(p->dim_x(), -10, 10);
      try {
        const auto exact = closed.y_star(*p, x);
        const double err = distance(iterative.y_star(*p, x), exact);
        if (equiv.observe(1e-8 - err, [&] { return where(*p) + " |y_iter - y_closed| " + format_double(err); })) {
          attach(equiv);
        }
        const double gerr = distance(grad_mapping(*p, x, eta, closed), grad_mapping(*p, x, eta, iterative));
        if (gmap.observe(1e-7 - gerr, [&] { return where(*p) + " |G diff| " + format_double(gerr); })) attach(gmap);
      } catch (const NonconvergenceError& e) {
        equiv.fail(where(*p) + ": " + e.what());
        attach(equiv);
      }
    }

    const bool rate_kappa =
        std::find(spec.rate_kappas.begin(), spec.rate_kappas.end(), kappa) != spec.rate_kappas.end();
    if (p->family() == Family::quad_coupled && rate_kappa) {
      const auto x = rng.uniform_vector(p->dim_x(), -10, 10);
      const double c = inner_rate_constant(*p, x);
      if (rate.observe(10.0 - c, [&] { return where(*p) + " fitted C " + format_double(c); })) attach(rate);
    }
  }
  return {smooth.finish(), concave.finish(), ylip.finish(), philip.finish(),
          fd.finish(),     equiv.finish(),   gmap.finish(), rate.finish()};
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> verify_lyapunov(const VerifySpec& spec) {
  Tracker mono("lyapunov.monotone"), drop("lyapunov.decrease");
  for (const auto& p : all_instances(spec)) {
    auto c = default_config(*p, Algorithm::prox_altgdam);
    c.eta_x = spec.eta_x ? *spec.eta_x : c.eta_x * spec.eta_x_scale;
    YStarOracle oracle = default_oracle(*p);
    const double L = p->L(), k15 = std::pow(p->kappa(), 1.5);
    auto attach = [&](Tracker& t) {
      t.result().problem = p;
      t.result().config = c;
    };
    try {
      auto s = SolverState::initial(RealVector::zeros(p->dim_x()), RealVector::zeros(p->dim_y()));
      auto h = lyapunov_terms(*p, s, c, oracle);
      for (int t = 0; t < spec.lyapunov_iters; ++t) {
        auto next = step(*p, s, c);
        const auto hn = lyapunov_terms(*p, next, c, oracle);
        const double slack = lyapunov_slack(h.value);
        const double scale = std::max(1.0, std::abs(h.value));
        const double fall = h.value - hn.value;
        auto describe = [&] { return where(*p) + " at t=" + std::to_string(t); };
        if (mono.observe((fall + slack) / scale, describe)) attach(mono);
        const double need = L * k15 * squared_distance(next.x, s.x) + c.beta / (2 * c.eta_x) * h.x_step_sq +
                            L / (2 * k15) * h.y_gap_sq;
        if (drop.observe((fall - need + slack) / scale, describe)) attach(drop);
        s = std::move(next);
        h = hn;
      }
    } catch (const std::runtime_error& e) {
      mono.fail(where(*p) + ": " + e.what());
      attach(mono);
    }
  }
  return {mono.finish(), drop.finish()};
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> verify_bound(const VerifySpec& spec) {
  Tracker conv("bound.converged"), agg("bound.aggregate"), stable("bound.stability"),
      limit("bound.objective_limit");
  for (const auto& p : all_instances(spec)) {
    const auto c = default_config(*p, Algorithm::prox_altgdam);
    auto attach = [&](Tracker& t) {
      t.result().problem = p;
      t.result().config = c;
    };
    RunOptions options;
    options.max_iters = spec.bound_max_iters;
    options.eps = spec.bound_eps;
    const auto trace = run(*p, c, options);
    if (!trace.meta.eps_reached_at) {
      conv.fail(where(*p) + ": " + (trace.meta.error.empty() ? "eps not reached" : trace.meta.error));
      attach(conv);
      continue;
    }
    conv.observe(0, [] { return ""; });

    const auto rep = check_aggregate_bound(trace, *p, c, p->objective_lower_bound());
    if (agg.observe(1.0 - rep.ratio, [&] { return where(*p) + " ratio " + format_double(rep.ratio); })) attach(agg);

    // Final 10% of iterations.
    const auto T = trace.rows.back().t;
    const auto from = static_cast<std::int64_t>(std::ceil(0.9 * static_cast<double>(T)));
    double worst = 0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : trace.rows) {
      if (row.t < from) continue;
      worst = std::max({worst, row.dx_norm, row.dy_norm, row.y_gap});
      lo = std::min(lo, row.objective);
      hi = std::max(hi, row.objective);
    }
    if (stable.observe(1.0 - worst / 1e-6, [&] { return where(*p) + " max increment " + format_double(worst); })) {
      attach(stable);
    }
    const double tol = 1e-8 * std::max(1.0, std::abs(trace.rows.back().objective));
    if (limit.observe((tol - (hi - lo)) / tol, [&] { return where(*p) + " range " + format_double(hi - lo); })) {
      attach(limit);
    }
  }
  return {conv.finish(), agg.finish(), stable.finish(), limit.finish()};
}

VerifyReport verify(const VerifySpec& spec) {
  spec.validate();
  VerifyReport report;
  auto want = [&](const char* s) { return std::find(spec.scope.begin(), spec.scope.end(), s) != spec.scope.end(); };
  auto append = [&](std::vector<CheckResult> v) {
    for (auto& c : v) report.checks.push_back(std::move(c));
  };
  if (want("prox")) append(verify_prox(spec));
  if (want("regularity")) append(verify_regularity(spec));
  if (want("lyapunov")) append(verify_lyapunov(spec));
  if (want("bound")) append(verify_bound(spec));
  return report;
}

}  // namespace minimax
