#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfl/density_types.hpp"

namespace mfl {

/// sum_i p_i ln(p_i / q_i) over bins with p_i > 0.
///
/// When n_samples > 0 the proxy q is first floored at 1 / (10 n_samples)
/// and renormalized, so an empty bin cannot make the error infinite. With
/// n_samples == 0 the proxy is used as is.
double relative_entropy(const HistogramDensity& true_h, const HistogramDensity& proxy_h,
                        std::size_t n_samples = 0);

/// Euclidean norm of the bin-mass difference vector.
double l2_error(const HistogramDensity& true_h, const HistogramDensity& proxy_h);

/// Piecewise-linear table, constant beyond its end points.
struct TabulatedFunction {
  std::vector<double> x;
  std::vector<double> y;

  double value(double t) const;
  double slope(double t) const;
};

struct TestFunction {
  enum class Kind { PositivePart, Identity, Square, Table };
  Kind kind = Kind::PositivePart;
  TabulatedFunction table{};

  double value(double x) const;
  /// Derivative; for PositivePart the one-sided value 1{x >= 0}.
  double derivative(double x) const;
  std::string name() const;
};

TestFunction parse_test_function(const std::string& name);

/// (1/N) sum f(x_i).
double weak_functional(std::span<const double> positions, const TestFunction& f = {});

/// max over the listed snapshot indices of sqrt(mean_i |coarse_i - ref_i|^2).
/// coarse[k] and reference[k] must describe the same time point; an empty
/// at_steps means every index.
double strong_error(const std::vector<std::vector<double>>& coarse,
                    const std::vector<std::vector<double>>& reference,
                    std::span<const std::size_t> at_steps = {});

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct LogPoint {
  double x;
  double y;
};

/// Ordinary least squares of log10 y on log10 x.
RegressionFit regression_slope(std::span<const LogPoint> points);

/// One experiment row.
struct ErrorReport {
  std::string scheme;
  std::size_t n_particles = 0;
  double h = 0.0;
  double T = 0.0;
  std::uint64_t seed = 0;
  double a = 0.0;
  double b = 0.0;
  std::size_t nbins = 0;
  double entropy_error = 0.0;
  double l2_error = 0.0;
  std::optional<double> weak_value;
  std::optional<double> strong_error;
  std::string notes;
};

}  // namespace mfl
