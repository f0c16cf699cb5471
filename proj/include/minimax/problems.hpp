#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minimax/core.hpp"
#include "minimax/kvdoc.hpp"
#include "minimax/prox.hpp"

namespace minimax {

enum class Family { quad_coupled, sparse_adversarial };

std::string to_string(Family family);
Family parse_family(const std::string& text);

/// min_x max_y f(x,y) + g(x) - h(y), with f L-smooth and mu-strongly concave in y.
class MinimaxProblem {
 public:
  virtual ~MinimaxProblem() = default;

  virtual Family family() const = 0;
  virtual std::size_t dim_x() const = 0;
  virtual std::size_t dim_y() const = 0;
  /// Smoothness constant: every partial gradient is L-Lipschitz in each argument.
  virtual double L() const = 0;
  virtual double mu() const = 0;
  double kappa() const { return L() / mu(); }

  virtual double f(const RealVector& x, const RealVector& y) const = 0;
  virtual RealVector grad1(const RealVector& x, const RealVector& y) const = 0;
  virtual RealVector grad2(const RealVector& x, const RealVector& y) const = 0;
  virtual const ProxOperator& g() const = 0;
  virtual const ProxOperator& h() const = 0;

  virtual std::optional<RealVector> closed_form_y_star(const RealVector& x) const = 0;
  virtual std::optional<double> closed_form_phi(const RealVector& x) const = 0;
  /// A finite lower bound on Phi + g computed from the stored data
  /// (-inf if the stored data is not coercive).
  virtual double objective_lower_bound() const = 0;

  virtual std::uint64_t seed() const = 0;
  /// Structured text form; `problem_from_document` inverts it exactly.
  virtual KeyValueDoc to_document() const = 0;
};

using ProblemPtr = std::shared_ptr<const MinimaxProblem>;

/// Data shared by both synthetic families: Q = diag(q) in the identity basis,
/// a diagonal-rectangular coupling with singular values sigma (length
/// min(dim_x, dim_y)), offset b, modulus mu and the two regularizers.
struct SpectralData {
  std::vector<double> q;
  std::vector<double> sigma;
  std::vector<double> b;
  double mu = 1.0;
  ProxOperator g;
  ProxOperator h;
  std::uint64_t seed = 0;
};

class SpectralProblem : public MinimaxProblem {
 public:
  explicit SpectralProblem(SpectralData data, std::size_t dim_x, std::size_t dim_y);

  std::size_t dim_x() const override { return data_.q.size(); }
  std::size_t dim_y() const override { return data_.b.size(); }
  double L() const override { return L_; }
  double mu() const override { return data_.mu; }
  const ProxOperator& g() const override { return data_.g; }
  const ProxOperator& h() const override { return data_.h; }
  std::uint64_t seed() const override { return data_.seed; }
  KeyValueDoc to_document() const override;

  const SpectralData& data() const { return data_; }
  double lambda_min_q() const;
  /// min_i of the diagonal of Q + A A^T / mu, the coercivity margin of Phi.
  double coercivity_margin() const;

 protected:
  /// (C x)_j = sigma_j x_j for j < min(m, n), zero otherwise; maps R^m -> R^n.
  RealVector couple_x(const RealVector& x) const;
  /// Adjoint of couple_x; maps R^n -> R^m.
  RealVector couple_y(const RealVector& y) const;
  void check_dims(const RealVector& x, const RealVector& y) const;
  void check_x(const RealVector& x) const;

  SpectralData data_;
  double L_ = 0.0;
};

/// f(x,y) = 1/2 x'Qx + x'Ay + b'y - mu/2 ||y||^2, h = 0.
class QuadCoupledProblem final : public SpectralProblem {
 public:
  QuadCoupledProblem(SpectralData data, std::size_t dim_x, std::size_t dim_y);

  Family family() const override { return Family::quad_coupled; }
  double f(const RealVector& x, const RealVector& y) const override;
  RealVector grad1(const RealVector& x, const RealVector& y) const override;
  RealVector grad2(const RealVector& x, const RealVector& y) const override;
  std::optional<RealVector> closed_form_y_star(const RealVector& x) const override;
  std::optional<double> closed_form_phi(const RealVector& x) const override;
  double objective_lower_bound() const override;
};

/// f(x,y) = 1/2 x'Qx + <y, Ax - b> - mu/2 ||y||^2, h = lambda_y ||y||_1.
class SparseAdversarialProblem final : public SpectralProblem {
 public:
  SparseAdversarialProblem(SpectralData data, std::size_t dim_x, std::size_t dim_y);

  Family family() const override { return Family::sparse_adversarial; }
  double lambda_y() const { return data_.h.weight(); }
  double f(const RealVector& x, const RealVector& y) const override;
  RealVector grad1(const RealVector& x, const RealVector& y) const override;
  RealVector grad2(const RealVector& x, const RealVector& y) const override;
  std::optional<RealVector> closed_form_y_star(const RealVector& x) const override;
  std::optional<double> closed_form_phi(const RealVector& x) const override;
  double objective_lower_bound() const override;
};

struct ProblemSpec {
  Family family = Family::quad_coupled;
  std::size_t dim_x = 4;
  std::size_t dim_y = 4;
  double kappa_target = 16.0;
  double mu = 1.0;
  ProxKind g_kind = ProxKind::zero;
  double g_weight = 0.0;
  double g_lo = -1.0;
  double g_hi = 1.0;
  /// lambda_y for sparse_adversarial; ignored for quad_coupled (h = 0).
  double h_weight = 0.1;
  /// b is drawn uniformly from [-b_scale, b_scale]^dim_y.
  double b_scale = 1.0;
  std::uint64_t seed = 0;

  /// Throws ValidationError naming the first violated constraint.
  void validate() const;
};

/// Lower end of the singular-value draw for non-leading coupling modes, as a
/// fraction of L.
inline constexpr double kSigmaLowFraction = 0.5;
/// Required margin: Q + A A^T / mu >= kCoercivityMargin * L * I.
inline constexpr double kCoercivityMargin = 0.01;

/// Builds a problem with L = kappa_target * mu exactly: sigma_0 = L,
/// q_0 = -L/2, and every other q_i drawn inside the admissible interval
/// [max(-L/2, 0.01 L - sigma_i^2/mu), L/2].
ProblemPtr generate(const ProblemSpec& spec, Rng& rng);
/// Same as generate with Rng(spec.seed).
ProblemPtr generate(const ProblemSpec& spec);

ProblemPtr problem_from_document(const KeyValueDoc& doc);
ProblemPtr read_problem_file(const std::string& path);
void write_problem_file(const MinimaxProblem& p, const std::string& path);

struct SmoothnessReport {
  /// Largest ||grad_i f(.) - grad_i f(.')|| / (L ||.-.'||) over the four
  /// (gradient, argument) blocks.
  double max_grad_ratio = 0.0;
  /// Joint ratio ||grad f(z) - grad f(z')|| / (L ||z - z'||); informational.
  double max_joint_ratio = 0.0;
  /// Smallest -<grad2 f(x,y) - grad2 f(x,y'), y - y'> / ||y - y'||^2.
  double min_concavity = 0.0;
  bool ok = true;
  std::string violation;
};

/// Samples pairs uniformly in [-10, 10]^dim and checks the Lipschitz and
/// strong-concavity constants of the problem.
SmoothnessReport check_smoothness(const MinimaxProblem& p, Rng& rng, int trials);

}  // namespace minimax
