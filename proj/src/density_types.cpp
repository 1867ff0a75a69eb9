#include "mfl/density_types.hpp"

#include <algorithm>
#include <numbers>

namespace mfl {

double GaussianLaw::pdf(double x) const {
  const double z = (x - mean) / stddev();
  return std::exp(-0.5 * z * z) / (stddev() * std::sqrt(2.0 * std::numbers::pi));
}

double GaussianLaw::cdf(double x) const {
  return 0.5 * std::erfc(-(x - mean) / (stddev() * std::numbers::sqrt2));
}

double GaussianLaw::upper_tail(double x) const {
  return 0.5 * std::erfc((x - mean) / (stddev() * std::numbers::sqrt2));
}

double HistogramDensity::edge(std::size_t k) const {
  if (k == masses.size()) return b;
  return a + (b - a) * static_cast<double>(k) / static_cast<double>(masses.size());
}

double HistogramDensity::total() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

bool HistogramDensity::same_layout(const HistogramDensity& other) const {
  return a == other.a && b == other.b && masses.size() == other.masses.size();
}

double GridDensity::trapezoid_integral() const {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * spacing;
}

std::size_t GridDensity::mode_index() const {
  return static_cast<std::size_t>(
      std::distance(values.begin(), std::max_element(values.begin(), values.end())));
}

double GridDensity::operator()(double x) const {
  if (grid.empty() || x < grid.front() || x > grid.back()) return 0.0;
  const double pos = (x - grid.front()) / spacing;
  auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= grid.size()) return values.back();
  const double t = pos - static_cast<double>(k);
  return (1.0 - t) * values[k] + t * values[k + 1];
}

}  // namespace mfl
