#include "mfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfl/errors.hpp"

namespace mfl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// d-th derivative of sum_k c_k x^k.
double polynomial_derivative(const std::vector<double>& coeffs, int d, double x) {
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > static_cast<std::size_t>(d);) {
    double factor = 1.0;
    for (int r = 0; r < d; ++r) factor *= static_cast<double>(k - r);
    acc = acc * x + factor * coeffs[k];
  }
  return acc;
}

double u_derivative(const ConfiningPotential& u, int d, double x) {
  return std::visit(
      Overloaded{
          [&](const QuadraticPotential& q) {
            switch (d) {
              case 0: return 0.5 * q.curvature * x * x;
              case 1: return q.curvature * x;
              case 2: return q.curvature;
              default: return 0.0;
            }
          },
          [&](const PolynomialPotential& p) {
            return polynomial_derivative(p.coeffs, d, x);
          },
      },
      u);
}

double v_derivative(const InteractionPotential& v, int d, double x) {
  return std::visit(
      Overloaded{
          [](const ZeroInteraction&) { return 0.0; },
          [&](const QuadraticInteraction& q) {
            switch (d) {
              case 0: return 0.5 * q.alpha * x * x;
              case 1: return q.alpha * x;
              case 2: return q.alpha;
              default: return 0.0;
            }
          },
          [&](const LogCoshInteraction& l) {
            const double ax = std::abs(x);
            const double t = std::tanh(x);
            const double s2 = 1.0 - t * t;
            switch (d) {
              // log cosh x = |x| + log1p(exp(-2|x|)) - log 2, stable for large |x|.
              case 0: return l.beta * (ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0));
              case 1: return l.beta * t;
              case 2: return l.beta * s2;
              case 3: return -2.0 * l.beta * t * s2;
              default: return 0.0;
            }
          },
      },
      v);
}

}  // namespace

std::vector<double> validation_grid() {
  constexpr int kPoints = 401;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) grid[i] = -10.0 + 20.0 * i / (kPoints - 1);
  return grid;
}

ModelSpec::ModelSpec(ConfiningPotential u, InteractionPotential v, double sigma)
    : u_(std::move(u)), v_(std::move(v)), sigma_(sigma) {
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) {
    throw ModelError("sigma must be finite and non-negative");
  }
  lambda_ = std::numeric_limits<double>::infinity();
  k_v_ = 0.0;
  for (double x : validation_grid()) {
    lambda_ = std::min(lambda_, u_derivative(u_, 2, x));
    k_v_ = std::max(k_v_, std::abs(v_derivative(v_, 2, x)));
  }
}

ModelSpec ModelSpec::linear(double alpha, double sigma) {
  return ModelSpec(QuadraticPotential{1.0}, QuadraticInteraction{alpha}, sigma);
}

double ModelSpec::interaction_alpha() const {
  if (const auto* q = std::get_if<QuadraticInteraction>(&v_)) return q->alpha;
  return 0.0;
}

double potential_u(const ModelSpec& m, double x) { return u_derivative(m.confining(), 0, x); }
double grad_u(const ModelSpec& m, double x) { return u_derivative(m.confining(), 1, x); }
double hess_u(const ModelSpec& m, double x) { return u_derivative(m.confining(), 2, x); }
double third_u(const ModelSpec& m, double x) { return u_derivative(m.confining(), 3, x); }

double potential_v(const ModelSpec& m, double x) { return v_derivative(m.interaction(), 0, x); }
double grad_v(const ModelSpec& m, double x) { return v_derivative(m.interaction(), 1, x); }
double hess_v(const ModelSpec& m, double x) { return v_derivative(m.interaction(), 2, x); }
double third_v(const ModelSpec& m, double x) { return v_derivative(m.interaction(), 3, x); }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Warn: return "warn";
    case Verdict::Fail: return "fail";
  }
  return "?";
}

bool AssumptionReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return c.verdict == Verdict::Pass; });
}

bool AssumptionReport::has_failure() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return c.verdict == Verdict::Fail; });
}

AssumptionReport check_assumptions(const ModelSpec& model) {
  AssumptionReport report;
  report.lambda = model.lambda();
  report.k_v = model.k_v();

  double min_hess_v = std::numeric_limits<double>::infinity();
  double max_hess_v = -std::numeric_limits<double>::infinity();
  double max_odd_defect = 0.0;
  for (double x : validation_grid()) {
    const double hv = hess_v(model, x);
    min_hess_v = std::min(min_hess_v, hv);
    max_hess_v = std::max(max_hess_v, hv);
    max_odd_defect = std::max(max_odd_defect, std::abs(grad_v(model, x) + grad_v(model, -x)));
  }

  std::ostringstream a;
  a << "min U'' on grid = " << report.lambda;
  report.checks.push_back({"uniform_convexity_of_U",
                           report.lambda > 0.0 ? Verdict::Pass : Verdict::Fail, a.str()});

  std::ostringstream b;
  b << "V'' in [" << min_hess_v << ", " << max_hess_v << "], k_v = " << report.k_v
    << ", max |V'(x)+V'(-x)| = " << max_odd_defect;
  const bool v_ok = min_hess_v >= 0.0 && max_hess_v <= report.k_v && max_odd_defect == 0.0;
  report.checks.push_back({"convex_even_bounded_V", v_ok ? Verdict::Pass : Verdict::Fail, b.str()});

  std::ostringstream c;
  c << "lambda = " << report.lambda << ", 7 k_v = " << 7.0 * report.k_v;
  // The schemes behave well on models violating this; it is only reported.
  report.checks.push_back({"lambda_ge_7kv",
                           report.lambda >= 7.0 * report.k_v ? Verdict::Pass : Verdict::Warn,
                           c.str()});
  return report;
}

void require_valid_model(const ModelSpec& model) {
  const auto report = check_assumptions(model);
  for (const auto& c : report.checks) {
    if (c.verdict == Verdict::Fail) {
      throw ModelError("model assumption violated: " + c.name + " (" + c.detail + ")");
    }
  }
}

}  // namespace mfl
