#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace mfl {

struct GaussianLaw {
  double mean = 0.0;
  double variance = 1.0;

  static GaussianLaw from_std(double mean, double std) { return {mean, std * std}; }

  double stddev() const { return std::sqrt(variance); }
  double pdf(double x) const;
  double cdf(double x) const;
  /// P(X > x), accurate in the far right tail.
  double upper_tail(double x) const;
};

/// Binned probability masses on [a, b] with nbins equal bins. The first bin
/// also carries (-inf, a) and the last bin [b, inf).
struct HistogramDensity {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> masses;

  std::size_t nbins() const { return masses.size(); }
  double bin_width() const { return (b - a) / static_cast<double>(masses.size()); }
  /// Left edge of bin k; edge(nbins) == b.
  double edge(std::size_t k) const;
  double total() const;
  bool same_layout(const HistogramDensity& other) const;
};

/// Density sampled on an equally spaced grid, normalized by the trapezoid rule.
struct GridDensity {
  std::vector<double> grid;
  std::vector<double> values;
  double spacing = 0.0;

  double trapezoid_integral() const;
  std::size_t mode_index() const;
  /// Linear interpolation, zero outside the grid.
  double operator()(double x) const;
};

}  // namespace mfl
