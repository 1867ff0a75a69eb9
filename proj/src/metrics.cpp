#include "mfl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfl/errors.hpp"

namespace mfl {

namespace {

void require_same_layout(const HistogramDensity& p, const HistogramDensity& q) {
  if (!p.same_layout(q)) throw std::invalid_argument("histograms have different bin layouts");
}

}  // namespace

double relative_entropy(const HistogramDensity& true_h, const HistogramDensity& proxy_h,
                        std::size_t n_samples) {
  require_same_layout(true_h, proxy_h);
  std::vector<double> q = proxy_h.masses;
  if (n_samples > 0) {
    const double floor = 1.0 / (10.0 * static_cast<double>(n_samples));
    double total = 0.0;
    for (double& v : q) {
      v = std::max(v, floor);
      total += v;
    }
    for (double& v : q) v /= total;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double p = true_h.masses[i];
    if (p > 0.0) s += p * std::log(p / q[i]);
  }
  return s;
}

double l2_error(const HistogramDensity& true_h, const HistogramDensity& proxy_h) {
  require_same_layout(true_h, proxy_h);
  double s = 0.0;
  for (std::size_t i = 0; i < true_h.masses.size(); ++i) {
    const double d = true_h.masses[i] - proxy_h.masses[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double TabulatedFunction::value(double t) const {
  if (x.empty()) return 0.0;
  if (t <= x.front()) return y.front();
  if (t >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
  const double w = (t - x[k]) / (x[k + 1] - x[k]);
  return (1.0 - w) * y[k] + w * y[k + 1];
}

double TabulatedFunction::slope(double t) const {
  if (x.size() < 2 || t < x.front() || t >= x.back()) return 0.0;
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - x.begin()) - 1;
  return (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
}

double TestFunction::value(double x) const {
  switch (kind) {
    case Kind::PositivePart: return x >= 0.0 ? x : 0.0;
    case Kind::Identity: return x;
    case Kind::Square: return x * x;
    case Kind::Table: return table.value(x);
  }
  return 0.0;
}

double TestFunction::derivative(double x) const {
  switch (kind) {
    case Kind::PositivePart: return x >= 0.0 ? 1.0 : 0.0;
    case Kind::Identity: return 1.0;
    case Kind::Square: return 2.0 * x;
    case Kind::Table: return table.slope(x);
  }
  return 0.0;
}

std::string TestFunction::name() const {
  switch (kind) {
    case Kind::PositivePart: return "positive-part";
    case Kind::Identity: return "identity";
    case Kind::Square: return "square";
    case Kind::Table: return "table";
  }
  return "?";
}

TestFunction parse_test_function(const std::string& name) {
  if (name == "positive-part") return {TestFunction::Kind::PositivePart, {}};
  if (name == "identity") return {TestFunction::Kind::Identity, {}};
  if (name == "square") return {TestFunction::Kind::Square, {}};
  throw ConfigError("unknown test function '" + name + "'");
}

double weak_functional(std::span<const double> positions, const TestFunction& f) {
  if (positions.empty()) throw std::invalid_argument("weak_functional: empty ensemble");
  double s = 0.0;
  for (double x : positions) s += f.value(x);
  return s / static_cast<double>(positions.size());
}

double strong_error(const std::vector<std::vector<double>>& coarse,
                    const std::vector<std::vector<double>>& reference,
                    std::span<const std::size_t> at_steps) {
  if (coarse.size() != reference.size()) {
    throw std::invalid_argument("strong_error: trajectories have different grids");
  }
  auto gap = [&](std::size_t k) {
    const auto& x = coarse.at(k);
    const auto& y = reference.at(k);
    if (x.size() != y.size() || x.empty()) {
      throw std::invalid_argument("strong_error: particle counts differ");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s / static_cast<double>(x.size()));
  };
  double worst = 0.0;
  if (at_steps.empty()) {
    for (std::size_t k = 0; k < coarse.size(); ++k) worst = std::max(worst, gap(k));
  } else {
    for (std::size_t k : at_steps) worst = std::max(worst, gap(k));
  }
  return worst;
}

RegressionFit regression_slope(std::span<const LogPoint> points) {
  if (points.size() < 2) throw std::invalid_argument("regression_slope: need at least two points");
  std::vector<double> lx, ly;
  for (const auto& p : points) {
    if (!(p.x > 0.0) || !(p.y > 0.0)) {
      throw std::invalid_argument("regression_slope: coordinates must be positive");
    }
    lx.push_back(std::log10(p.x));
    ly.push_back(std::log10(p.y));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("regression_slope: all x values coincide");
  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace mfl
