#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace minimax {

/// Precondition broken by the caller (dimension mismatch, bad step, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A user-supplied spec or document failed validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver iterate became non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t t, std::string quantity)
      : std::runtime_error("divergence at t=" + std::to_string(t) + ": non-finite " + quantity),
        t_(t),
        quantity_(std::move(quantity)) {}

  std::int64_t t() const { return t_; }
  const std::string& quantity() const { return quantity_; }

 private:
  std::int64_t t_;
  std::string quantity_;
};

/// Iterative inner maximization ran out of iterations.
class NonconvergenceError : public std::runtime_error {
 public:
  NonconvergenceError(const std::string& what, std::vector<double> last_iterate, double achieved_gap)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)), gap_(achieved_gap) {}

  const std::vector<double>& last_iterate() const { return last_iterate_; }
  double achieved_gap() const { return gap_; }

 private:
  std::vector<double> last_iterate_;
  double gap_;
};

/// An indicator regularizer evaluated to +inf where a finite value was required.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An analysis was requested for a configuration it was not derived for.
class InapplicableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace minimax
