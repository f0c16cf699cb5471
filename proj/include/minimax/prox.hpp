#pragma once

#include <limits>
#include <string>

#include "minimax/core.hpp"

namespace minimax {

/// Value reported by indicator regularizers outside their feasible set.
inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

RealVector prox_zero(const RealVector& v, double step);
/// Soft-thresholding: prox of weight * ||u||_1. Entries with |v_i| <= step*weight map to 0.
RealVector prox_l1(const RealVector& v, double step, double weight);
/// prox of (weight/2) ||u||^2, i.e. v / (1 + step*weight).
RealVector prox_sq_l2(const RealVector& v, double step, double weight);
/// Projection onto [lo, hi]^dim; step is accepted but unused.
RealVector prox_box(const RealVector& v, double step, double lo, double hi);

enum class ProxKind { zero, l1, sq_l2, box };

std::string to_string(ProxKind kind);
ProxKind parse_prox_kind(const std::string& text);

/// A proper convex regularizer r with a closed-form proximal map.
class ProxOperator {
 public:
  ProxOperator() = default;

  static ProxOperator zero() { return {}; }
  static ProxOperator l1(double weight);
  static ProxOperator sq_l2(double weight);
  static ProxOperator box(double lo, double hi);

  ProxKind kind() const { return kind_; }
  double weight() const { return weight_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  /// r(v); kInfeasible outside the box for indicators.
  double evaluate(const RealVector& v) const;
  /// argmin_u r(u) + ||u - v||^2 / (2 step).
  RealVector prox(const RealVector& v, double step) const;

  bool operator==(const ProxOperator&) const = default;

 private:
  ProxKind kind_ = ProxKind::zero;
  double weight_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

}  // namespace minimax
