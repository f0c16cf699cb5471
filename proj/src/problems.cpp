#include "minimax/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minimax/errors.hpp"

namespace minimax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSampleBox = 10.0;

/// min of a x^2 + b x + c over [lo, hi] (bounds may be infinite).
double min_quadratic(double a, double b, double c, double lo, double hi) {
  auto at = [&](double x) { return (a * x + b) * x + c; };
  auto end_value = [&](double x, int dir) {
    if (std::isfinite(x)) return at(x);
    // Limit as x -> dir * inf.
    if (a > 0) return kInf;
    if (a < 0) return -kInf;
    if (b == 0) return c;
    return (b * dir > 0) ? kInf : -kInf;
  };
  double best = std::min(end_value(lo, -1), end_value(hi, +1));
  if (a > 0) {
    const double x = std::clamp(-b / (2 * a), lo, hi);
    best = std::min(best, at(x));
  }
  return best;
}

double soft_threshold(double u, double lambda) {
  const double a = std::abs(u);
  return a <= lambda ? 0.0 : std::copysign(a - lambda, u);
}

void check_family_regularizers(Family family, const SpectralData& d) {
  if (family == Family::quad_coupled && d.h.kind() != ProxKind::zero) {
    throw ContractViolation("quad_coupled requires h = 0");
  }
  if (family == Family::sparse_adversarial && !(d.h.kind() == ProxKind::l1 && d.h.weight() > 0)) {
    throw ContractViolation("sparse_adversarial requires h = lambda_y ||y||_1 with lambda_y > 0");
  }
}

}  // namespace

std::string to_string(Family family) {
  return family == Family::quad_coupled ? "quad_coupled" : "sparse_adversarial";
}

Family parse_family(const std::string& text) {
  if (text == "quad_coupled") return Family::quad_coupled;
  if (text == "sparse_adversarial") return Family::sparse_adversarial;
  throw ValidationError("unknown problem family '" + text +
                        "' (expected quad_coupled or sparse_adversarial)");
}

// ---------------------------------------------------------------------------

SpectralProblem::SpectralProblem(SpectralData data, std::size_t dim_x, std::size_t dim_y)
    : data_(std::move(data)) {
  if (dim_x == 0 || dim_y == 0) throw ContractViolation("problem dimensions must be positive");
  if (data_.q.size() != dim_x) throw ContractViolation("q must have dim_x entries");
  if (data_.b.size() != dim_y) throw ContractViolation("b must have dim_y entries");
  if (data_.sigma.size() != std::min(dim_x, dim_y)) {
    throw ContractViolation("sigma must have min(dim_x, dim_y) entries");
  }
  if (!(data_.mu > 0) || !std::isfinite(data_.mu)) throw ContractViolation("mu must be positive");
  double L = data_.mu;
  for (double q : data_.q) {
    if (!std::isfinite(q)) throw ContractViolation("q must be finite");
    L = std::max(L, std::abs(q));
  }
  for (double s : data_.sigma) {
    if (!(s >= 0) || !std::isfinite(s)) throw ContractViolation("sigma must be nonnegative");
    L = std::max(L, s);
  }
  for (double b : data_.b) {
    if (!std::isfinite(b)) throw ContractViolation("b must be finite");
  }
  L_ = L;
}

double SpectralProblem::lambda_min_q() const { return *std::min_element(data_.q.begin(), data_.q.end()); }

double SpectralProblem::coercivity_margin() const {
  double m = kInf;
  for (std::size_t i = 0; i < data_.q.size(); ++i) {
    const double s = i < data_.sigma.size() ? data_.sigma[i] : 0.0;
    m = std::min(m, data_.q[i] + s * s / data_.mu);
  }
  return m;
}

RealVector SpectralProblem::couple_x(const RealVector& x) const {
  const auto k = data_.sigma.size();
  return RealVector::generate(dim_y(), [&](std::size_t j) { return j < k ? data_.sigma[j] * x[j] : 0.0; });
}

RealVector SpectralProblem::couple_y(const RealVector& y) const {
  const auto k = data_.sigma.size();
  return RealVector::generate(dim_x(), [&](std::size_t i) { return i < k ? data_.sigma[i] * y[i] : 0.0; });
}

void SpectralProblem::check_x(const RealVector& x) const {
  if (x.dim() != dim_x()) throw ContractViolation("x has wrong dimension");
}

void SpectralProblem::check_dims(const RealVector& x, const RealVector& y) const {
  check_x(x);
  if (y.dim() != dim_y()) throw ContractViolation("y has wrong dimension");
}

KeyValueDoc SpectralProblem::to_document() const {
  KeyValueDoc doc;
  doc.set("family", to_string(family()));
  doc.set("dim_x", std::to_string(dim_x()));
  doc.set("dim_y", std::to_string(dim_y()));
  doc.set("mu", format_double(data_.mu));
  doc.set("q", format_double_list(data_.q));
  doc.set("sigma", format_double_list(data_.sigma));
  doc.set("b", format_double_list(data_.b));
  doc.set("g.kind", to_string(data_.g.kind()));
  doc.set("g.weight", format_double(data_.g.weight()));
  doc.set("g.lo", format_double(data_.g.lo()));
  doc.set("g.hi", format_double(data_.g.hi()));
  doc.set("h.kind", to_string(data_.h.kind()));
  doc.set("h.weight", format_double(data_.h.weight()));
  doc.set("seed", std::to_string(data_.seed));
  return doc;
}

namespace {

double half_q_norm(const std::vector<double>& q, const RealVector& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q[i] * x[i] * x[i];
  return 0.5 * s;
}

RealVector q_times(const std::vector<double>& q, const RealVector& x) {
  return RealVector::generate(q.size(), [&](std::size_t i) { return q[i] * x[i]; });
}

}  // namespace

// ---------------------------------------------------------------------------

QuadCoupledProblem::QuadCoupledProblem(SpectralData data, std::size_t dim_x, std::size_t dim_y)
    : SpectralProblem(std::move(data), dim_x, dim_y) {
  check_family_regularizers(Family::quad_coupled, data_);
}

double QuadCoupledProblem::f(const RealVector& x, const RealVector& y) const {
  check_dims(x, y);
  const RealVector b(data_.b);
  return half_q_norm(data_.q, x) + dot(couple_x(x), y) + dot(b, y) - 0.5 * data_.mu * dot(y, y);
}

RealVector QuadCoupledProblem::grad1(const RealVector& x, const RealVector& y) const {
  check_dims(x, y);
  return add(q_times(data_.q, x), couple_y(y));
}

RealVector QuadCoupledProblem::grad2(const RealVector& x, const RealVector& y) const {
  check_dims(x, y);
  const auto cx = couple_x(x);
  return RealVector::generate(dim_y(), [&](std::size_t j) { return cx[j] + data_.b[j] - data_.mu * y[j]; });
}

std::optional<RealVector> QuadCoupledProblem::closed_form_y_star(const RealVector& x) const {
  check_x(x);
  const auto cx = couple_x(x);
  return RealVector::generate(dim_y(), [&](std::size_t j) { return (cx[j] + data_.b[j]) / data_.mu; });
}

std::optional<double> QuadCoupledProblem::closed_form_phi(const RealVector& x) const {
  check_x(x);
  const auto cx = couple_x(x);
  double s = 0.0;
  for (std::size_t j = 0; j < dim_y(); ++j) {
    const double u = cx[j] + data_.b[j];
    s += u * u;
  }
  return half_q_norm(data_.q, x) + s / (2 * data_.mu);
}

double QuadCoupledProblem::objective_lower_bound() const {
  // Phi separates per coordinate; g >= 0 for every supported regularizer.
  const double mu = data_.mu;
  const auto k = data_.sigma.size();
  double total = 0.0;
  for (std::size_t i = 0; i < dim_x(); ++i) {
    if (i < k) {
      const double s = data_.sigma[i], b = data_.b[i];
      total += min_quadratic(0.5 * data_.q[i] + s * s / (2 * mu), s * b / mu, b * b / (2 * mu), -kInf, kInf);
    } else {
      total += min_quadratic(0.5 * data_.q[i], 0.0, 0.0, -kInf, kInf);
    }
  }
  for (std::size_t j = k; j < dim_y(); ++j) total += data_.b[j] * data_.b[j] / (2 * mu);
  return total;
}

// ---------------------------------------------------------------------------

SparseAdversarialProblem::SparseAdversarialProblem(SpectralData data, std::size_t dim_x, std::size_t dim_y)
    : SpectralProblem(std::move(data), dim_x, dim_y) {
  check_family_regularizers(Family::sparse_adversarial, data_);
}

double SparseAdversarialProblem::f(const RealVector& x, const RealVector& y) const {
  check_dims(x, y);
  const auto cx = couple_x(x);
  double inner = 0.0;
  for (std::size_t j = 0; j < dim_y(); ++j) inner += y[j] * (cx[j] - data_.b[j]);
  return half_q_norm(data_.q, x) + inner - 0.5 * data_.mu * dot(y, y);
}

RealVector SparseAdversarialProblem::grad1(const RealVector& x, const RealVector& y) const {
  check_dims(x, y);
  return add(q_times(data_.q, x), couple_y(y));
}

RealVector SparseAdversarialProblem::grad2(const RealVector& x, const RealVector& y) const {
  check_dims(x, y);
  const auto cx = couple_x(x);
  return RealVector::generate(dim_y(), [&](std::size_t j) { return cx[j] - data_.b[j] - data_.mu * y[j]; });
}

std::optional<RealVector> SparseAdversarialProblem::closed_form_y_star(const RealVector& x) const {
  check_x(x);
  const auto cx = couple_x(x);
  const double lambda = lambda_y();
  return RealVector::generate(dim_y(), [&](std::size_t j) {
    return soft_threshold(cx[j] - data_.b[j], lambda) / data_.mu;
  });
}

std::optional<double> SparseAdversarialProblem::closed_form_phi(const RealVector& x) const {
  check_x(x);
  const auto cx = couple_x(x);
  const double lambda = lambda_y();
  double s = 0.0;
  for (std::size_t j = 0; j < dim_y(); ++j) {
    const double e = std::max(std::abs(cx[j] - data_.b[j]) - lambda, 0.0);
    s += e * e;
  }
  return half_q_norm(data_.q, x) + s / (2 * data_.mu);
}

double SparseAdversarialProblem::objective_lower_bound() const {
  // Per coordinate: 1/2 q x^2 + max(|sigma x - b| - lambda, 0)^2 / (2 mu),
  // minimized exactly over its three quadratic pieces.
  const double mu = data_.mu;
  const double lambda = lambda_y();
  const auto k = data_.sigma.size();
  double total = 0.0;
  for (std::size_t i = 0; i < dim_x(); ++i) {
    const double q = data_.q[i];
    if (i >= k) {
      total += min_quadratic(0.5 * q, 0.0, 0.0, -kInf, kInf);
      continue;
    }
    const double s = data_.sigma[i], b = data_.b[i];
    if (s == 0.0) {
      const double e = std::max(std::abs(b) - lambda, 0.0);
      total += min_quadratic(0.5 * q, 0.0, e * e / (2 * mu), -kInf, kInf);
      continue;
    }
    const double left_end = (b - lambda) / s;
    const double right_end = (b + lambda) / s;
    const double a_out = 0.5 * q + s * s / (2 * mu);
    const double left = min_quadratic(a_out, s * (lambda - b) / mu, (lambda - b) * (lambda - b) / (2 * mu),
                                      -kInf, left_end);
    const double mid = min_quadratic(0.5 * q, 0.0, 0.0, left_end, right_end);
    const double right = min_quadratic(a_out, -s * (b + lambda) / mu, (b + lambda) * (b + lambda) / (2 * mu),
                                       right_end, kInf);
    total += std::min({left, mid, right});
  }
  for (std::size_t j = k; j < dim_y(); ++j) {
    const double e = std::max(std::abs(data_.b[j]) - lambda, 0.0);
    total += e * e / (2 * mu);
  }
  return total;
}

// ---------------------------------------------------------------------------

void ProblemSpec::validate() const {
  auto bad = [](const std::string& what) { throw ValidationError("invalid problem spec: " + what); };
  if (dim_x < 1) bad("dim_x must be >= 1");
  if (dim_y < 1) bad("dim_y must be >= 1");
  if (!(kappa_target >= 1.0) || !std::isfinite(kappa_target)) bad("kappa_target must be >= 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) bad("mu must be > 0");
  if (!std::isfinite(kappa_target * mu)) bad("L = kappa_target * mu must be finite");
  if (!(g_weight >= 0.0) || !std::isfinite(g_weight)) bad("g_weight must be >= 0");
  if (g_kind == ProxKind::box && !(g_lo <= g_hi)) bad("g_lo must not exceed g_hi");
  if (family == Family::sparse_adversarial && !(h_weight > 0.0 && std::isfinite(h_weight))) {
    bad("h_weight (lambda_y) must be > 0 for sparse_adversarial");
  }
  if (!(b_scale >= 0.0) || !std::isfinite(b_scale)) bad("b_scale must be >= 0");
}

namespace {

ProxOperator make_g(const ProblemSpec& spec) {
  switch (spec.g_kind) {
    case ProxKind::zero: return ProxOperator::zero();
    case ProxKind::l1: return ProxOperator::l1(spec.g_weight);
    case ProxKind::sq_l2: return ProxOperator::sq_l2(spec.g_weight);
    case ProxKind::box: return ProxOperator::box(spec.g_lo, spec.g_hi);
  }
  return ProxOperator::zero();
}

ProblemPtr build(Family family, SpectralData data, std::size_t m, std::size_t n) {
  if (family == Family::quad_coupled) return std::make_shared<QuadCoupledProblem>(std::move(data), m, n);
  return std::make_shared<SparseAdversarialProblem>(std::move(data), m, n);
}

}  // namespace

ProblemPtr generate(const ProblemSpec& spec, Rng& rng) {
  spec.validate();
  const double mu = spec.mu;
  const double L = spec.kappa_target * mu;
  const std::size_t m = spec.dim_x, n = spec.dim_y, k = std::min(m, n);

  SpectralData d;
  d.mu = mu;
  d.seed = spec.seed;
  d.sigma.resize(k);
  d.sigma[0] = L;
  for (std::size_t i = 1; i < k; ++i) d.sigma[i] = rng.uniform(kSigmaLowFraction * L, L);
  d.q.resize(m);
  d.q[0] = -0.5 * L;
  for (std::size_t i = 1; i < m; ++i) {
    const double s = i < k ? d.sigma[i] : 0.0;
    const double lo = std::max(-0.5 * L, kCoercivityMargin * L - s * s / mu);
    d.q[i] = rng.uniform(lo, 0.5 * L);
  }
  d.b.resize(n);
  for (auto& b : d.b) b = rng.uniform(-spec.b_scale, spec.b_scale);
  d.g = make_g(spec);
  d.h = spec.family == Family::sparse_adversarial ? ProxOperator::l1(spec.h_weight) : ProxOperator::zero();
  return build(spec.family, std::move(d), m, n);
}

ProblemPtr generate(const ProblemSpec& spec) {
  Rng rng(spec.seed);
  return generate(spec, rng);
}

ProblemPtr problem_from_document(const KeyValueDoc& doc) {
  static const std::vector<std::string> known = {"family", "dim_x",    "dim_y", "mu",     "q",
                                                 "sigma",  "b",        "g.kind", "g.weight", "g.lo",
                                                 "g.hi",   "h.kind",   "h.weight", "seed"};
  for (const auto& e : doc.entries()) {
    if (std::find(known.begin(), known.end(), e.key) == known.end()) {
      throw ValidationError("problem document: unknown key '" + e.key + "' (did you mean '" +
                            nearest_key(e.key, known) + "'?)");
    }
  }
  const Family family = parse_family(doc.require("family"));
  const auto m = static_cast<std::size_t>(doc.get_int("dim_x", 0));
  const auto n = static_cast<std::size_t>(doc.get_int("dim_y", 0));
  SpectralData d;
  d.mu = doc.require_double("mu");
  d.q = parse_double_list(doc.require("q"));
  d.sigma = parse_double_list(doc.require("sigma"));
  d.b = parse_double_list(doc.require("b"));
  d.seed = doc.get_u64("seed", 0);

  const auto g_kind = parse_prox_kind(doc.get("g.kind").value_or("zero"));
  const double g_weight = doc.get_double("g.weight", 0.0);
  switch (g_kind) {
    case ProxKind::zero: d.g = ProxOperator::zero(); break;
    case ProxKind::l1: d.g = ProxOperator::l1(g_weight); break;
    case ProxKind::sq_l2: d.g = ProxOperator::sq_l2(g_weight); break;
    case ProxKind::box: d.g = ProxOperator::box(doc.require_double("g.lo"), doc.require_double("g.hi")); break;
  }
  const auto h_kind = parse_prox_kind(doc.get("h.kind").value_or("zero"));
  if (h_kind == ProxKind::l1) {
    d.h = ProxOperator::l1(doc.require_double("h.weight"));
  } else if (h_kind != ProxKind::zero) {
    throw ValidationError("problem document: h.kind must be zero or l1");
  }
  try {
    return build(family, std::move(d), m, n);
  } catch (const ContractViolation& e) {
    throw ValidationError(std::string("problem document: ") + e.what());
  }
}

ProblemPtr read_problem_file(const std::string& path) {
  return problem_from_document(KeyValueDoc::read_file(path));
}

void write_problem_file(const MinimaxProblem& p, const std::string& path) { p.to_document().write_file(path); }

// ---------------------------------------------------------------------------

SmoothnessReport check_smoothness(const MinimaxProblem& p, Rng& rng, int trials) {
  if (trials < 1) throw ContractViolation("check_smoothness: trials must be >= 1");
  const double L = p.L();
  const double mu = p.mu();
  SmoothnessReport rep;
  rep.min_concavity = kInf;
  for (int trial = 0; trial < trials; ++trial) {
    const auto x = rng.uniform_vector(p.dim_x(), -kSampleBox, kSampleBox);
    const auto y = rng.uniform_vector(p.dim_y(), -kSampleBox, kSampleBox);
    const auto x2 = rng.uniform_vector(p.dim_x(), -kSampleBox, kSampleBox);
    const auto y2 = rng.uniform_vector(p.dim_y(), -kSampleBox, kSampleBox);
    const double dx = distance(x, x2), dy = distance(y, y2);

    const auto g1 = p.grad1(x, y), g2 = p.grad2(x, y);
    const auto g1_x2 = p.grad1(x2, y), g2_x2 = p.grad2(x2, y);
    const auto g1_y2 = p.grad1(x, y2), g2_y2 = p.grad2(x, y2);
    const auto g1_xy2 = p.grad1(x2, y2), g2_xy2 = p.grad2(x2, y2);

    const double blocks[] = {
        distance(g1, g1_x2) / (L * dx),  // d grad1 / dx
        distance(g1, g1_y2) / (L * dy),  // d grad1 / dy
        distance(g2, g2_x2) / (L * dx),  // d grad2 / dx
        distance(g2, g2_y2) / (L * dy),  // d grad2 / dy
    };
    const double joint = std::sqrt(squared_distance(g1, g1_xy2) + squared_distance(g2, g2_xy2)) /
                         (L * std::sqrt(dx * dx + dy * dy));
    const double concavity = -dot(sub(g2, g2_y2), sub(y, y2)) / (dy * dy);

    for (double r : blocks) rep.max_grad_ratio = std::max(rep.max_grad_ratio, r);
    rep.max_joint_ratio = std::max(rep.max_joint_ratio, joint);
    rep.min_concavity = std::min(rep.min_concavity, concavity);

    if (rep.ok) {
      const double worst_block = *std::max_element(std::begin(blocks), std::end(blocks));
      if (worst_block > 1.0 + 1e-9) {
        rep.ok = false;
        rep.violation = "gradient Lipschitz ratio " + format_double(worst_block) + " > 1 at trial " +
                        std::to_string(trial) + ": x=[" + format_vector(x) + "] y=[" + format_vector(y) +
                        "] x'=[" + format_vector(x2) + "] y'=[" + format_vector(y2) + "]";
      } else if (concavity < mu * (1.0 - 1e-9)) {
        rep.ok = false;
        rep.violation = "strong concavity " + format_double(concavity) + " < mu at trial " +
                        std::to_string(trial) + ": x=[" + format_vector(x) + "] y=[" + format_vector(y) +
                        "] y'=[" + format_vector(y2) + "]";
      }
    }
  }
  return rep;
}

}  // namespace minimax
