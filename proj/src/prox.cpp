#include "minimax/prox.hpp"

#include <algorithm>
#include <cmath>

#include "minimax/errors.hpp"

namespace minimax {

namespace {

void require_step(double step, const char* where) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ContractViolation(std::string(where) + ": step must be positive and finite");
  }
}

void require_weight(double weight, const char* where) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw ContractViolation(std::string(where) + ": weight must be nonnegative and finite");
  }
}

}  // namespace

RealVector prox_zero(const RealVector& v, double step) {
  require_step(step, "prox_zero");
  return v;
}

RealVector prox_l1(const RealVector& v, double step, double weight) {
  require_step(step, "prox_l1");
  require_weight(weight, "prox_l1");
  const double thr = step * weight;
  return RealVector::generate(v.dim(), [&](std::size_t i) {
    const double a = std::abs(v[i]);
    if (a <= thr) return 0.0;
    return std::copysign(a - thr, v[i]);
  });
}

RealVector prox_sq_l2(const RealVector& v, double step, double weight) {
  require_step(step, "prox_sq_l2");
  require_weight(weight, "prox_sq_l2");
  const double denom = 1.0 + step * weight;
  return RealVector::generate(v.dim(), [&](std::size_t i) { return v[i] / denom; });
}

RealVector prox_box(const RealVector& v, double step, double lo, double hi) {
  require_step(step, "prox_box");
  if (!(lo <= hi)) throw ContractViolation("prox_box: lo must not exceed hi");
  return RealVector::generate(v.dim(), [&](std::size_t i) { return std::clamp(v[i], lo, hi); });
}

std::string to_string(ProxKind kind) {
  switch (kind) {
    case ProxKind::zero: return "zero";
    case ProxKind::l1: return "l1";
    case ProxKind::sq_l2: return "sq_l2";
    case ProxKind::box: return "box";
  }
  return "zero";
}

ProxKind parse_prox_kind(const std::string& text) {
  if (text == "zero") return ProxKind::zero;
  if (text == "l1") return ProxKind::l1;
  if (text == "sq_l2") return ProxKind::sq_l2;
  if (text == "box") return ProxKind::box;
  throw ValidationError("unknown regularizer kind '" + text + "' (expected zero, l1, sq_l2, box)");
}

ProxOperator ProxOperator::l1(double weight) {
  require_weight(weight, "ProxOperator::l1");
  ProxOperator op;
  op.kind_ = ProxKind::l1;
  op.weight_ = weight;
  return op;
}

ProxOperator ProxOperator::sq_l2(double weight) {
  require_weight(weight, "ProxOperator::sq_l2");
  ProxOperator op;
  op.kind_ = ProxKind::sq_l2;
  op.weight_ = weight;
  return op;
}

ProxOperator ProxOperator::box(double lo, double hi) {
  if (!(lo <= hi)) throw ContractViolation("ProxOperator::box: lo must not exceed hi");
  ProxOperator op;
  op.kind_ = ProxKind::box;
  op.lo_ = lo;
  op.hi_ = hi;
  return op;
}

double ProxOperator::evaluate(const RealVector& v) const {
  switch (kind_) {
    case ProxKind::zero: return 0.0;
    case ProxKind::l1: {
      double s = 0.0;
      for (double e : v.values()) s += std::abs(e);
      return weight_ * s;
    }
    case ProxKind::sq_l2: return 0.5 * weight_ * dot(v, v);
    case ProxKind::box:
      for (double e : v.values()) {
        if (e < lo_ || e > hi_) return kInfeasible;
      }
      return 0.0;
  }
  return 0.0;
}

RealVector ProxOperator::prox(const RealVector& v, double step) const {
  switch (kind_) {
    case ProxKind::zero: return prox_zero(v, step);
    case ProxKind::l1: return prox_l1(v, step, weight_);
    case ProxKind::sq_l2: return prox_sq_l2(v, step, weight_);
    case ProxKind::box: return prox_box(v, step, lo_, hi_);
  }
  return v;
}

}  // namespace minimax
