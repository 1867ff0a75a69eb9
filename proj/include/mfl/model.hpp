#pragma once

#include <string>
#include <variant>
#include <vector>

namespace mfl {

// Confining potentials U.

/// U(x) = c x^2 / 2.
struct QuadraticPotential {
  double curvature = 1.0;
};

/// U(x) = sum_k coeffs[k] x^k. Used for user-supplied confining potentials
/// (e.g. a cubic perturbation of the quadratic well).
struct PolynomialPotential {
  std::vector<double> coeffs;
};

using ConfiningPotential = std::variant<QuadraticPotential, PolynomialPotential>;

// Interaction potentials V. All built-in kinds are even.

struct ZeroInteraction {};

/// V(x) = alpha x^2 / 2.
struct QuadraticInteraction {
  double alpha = 0.5;
};

/// V(x) = beta log cosh(x). Convex, even, 0 < V'' <= beta.
struct LogCoshInteraction {
  double beta = 1.0;
};

using InteractionPotential =
    std::variant<ZeroInteraction, QuadraticInteraction, LogCoshInteraction>;

/// Potential pair plus noise level. Immutable once built; lambda and k_v are
/// derived from the potentials on construction.
class ModelSpec {
 public:
  ModelSpec(ConfiningPotential u, InteractionPotential v, double sigma);

  /// The linear mean-field example: U = x^2/2, V = alpha x^2/2.
  static ModelSpec linear(double alpha, double sigma);

  const ConfiningPotential& confining() const { return u_; }
  const InteractionPotential& interaction() const { return v_; }
  double sigma() const { return sigma_; }
  /// Uniform-convexity constant of U (minimum of U'' on the validation grid).
  double lambda() const { return lambda_; }
  /// Bound on |V''| (supremum on the validation grid).
  double k_v() const { return k_v_; }

  bool has_quadratic_interaction() const {
    return std::holds_alternative<QuadraticInteraction>(v_);
  }
  bool has_zero_interaction() const {
    return std::holds_alternative<ZeroInteraction>(v_);
  }
  /// alpha for QuadraticInteraction, 0 otherwise.
  double interaction_alpha() const;

 private:
  ConfiningPotential u_;
  InteractionPotential v_;
  double sigma_;
  double lambda_;
  double k_v_;
};

double potential_u(const ModelSpec& model, double x);
double grad_u(const ModelSpec& model, double x);
double hess_u(const ModelSpec& model, double x);
double third_u(const ModelSpec& model, double x);

double potential_v(const ModelSpec& model, double x);
double grad_v(const ModelSpec& model, double x);
double hess_v(const ModelSpec& model, double x);
double third_v(const ModelSpec& model, double x);

enum class Verdict { Pass, Warn, Fail };

const char* to_string(Verdict v);

struct AssumptionCheck {
  std::string name;
  Verdict verdict;
  std::string detail;
};

struct AssumptionReport {
  double lambda = 0.0;
  double k_v = 0.0;
  std::vector<AssumptionCheck> checks;

  bool all_pass() const;
  bool has_failure() const;
};

/// Evaluates the convexity/boundedness conditions on a grid of [-10, 10]:
///   (a) U'' >= lambda > 0
///   (b) 0 <= V'' <= k_v
///   (c) lambda >= 7 k_v  (warning only)
/// Never throws; `require_valid_model` turns failures into errors.
AssumptionReport check_assumptions(const ModelSpec& model);

/// Throws ModelError when check_assumptions reports a hard failure.
void require_valid_model(const ModelSpec& model);

/// Points on which assumptions are validated.
std::vector<double> validation_grid();

}  // namespace mfl
