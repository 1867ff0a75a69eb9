#include "mfl/ensemble.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace mfl {

namespace {

void require_same_size(std::span<const double> a, std::span<double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("drift: output size mismatch");
  if (a.empty()) throw std::invalid_argument("drift: need at least one particle");
}

}  // namespace

double sum(std::span<const double> values, const Execution& exec) {
  if (exec.reduction == ReductionMode::Deterministic || exec.threads <= 1) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  std::mutex m;
  double total = 0.0;
  parallel_for(values.size(), exec.threads, [&](std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += values[i];
    std::lock_guard lock(m);
    total += s;
  });
  return total;
}

void drift_pairwise(const ModelSpec& model, std::span<const double> x, std::span<double> out,
                    const Execution& exec) {
  require_same_size(x, out);
  const double inv_n = 1.0 / static_cast<double>(x.size());
  parallel_for(x.size(), exec.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double interaction = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) interaction += grad_v(model, x[i] - x[j]);
      out[i] = -grad_u(model, x[i]) - inv_n * interaction;
    }
  });
}

void drift(const ModelSpec& model, std::span<const double> x, std::span<double> out,
           const Execution& exec) {
  require_same_size(x, out);
  if (model.has_quadratic_interaction()) {
    const double alpha = model.interaction_alpha();
    const double mean = empirical_mean(x, exec);
    if (const auto* q = std::get_if<QuadraticPotential>(&model.confining())) {
      const double c = q->curvature;
      parallel_for(x.size(), exec.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = -c * x[i] - alpha * (x[i] - mean);
      });
      return;
    }
    parallel_for(x.size(), exec.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        out[i] = -grad_u(model, x[i]) - alpha * (x[i] - mean);
      }
    });
    return;
  }
  if (model.has_zero_interaction()) {
    parallel_for(x.size(), exec.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) out[i] = -grad_u(model, x[i]);
    });
    return;
  }
  drift_pairwise(model, x, out, exec);
}

std::vector<double> drift(const ModelSpec& model, std::span<const double> positions,
                          const Execution& exec) {
  std::vector<double> out(positions.size());
  drift(model, positions, out, exec);
  return out;
}

double empirical_mean(std::span<const double> positions, const Execution& exec) {
  if (positions.empty()) throw std::invalid_argument("empirical_mean: empty ensemble");
  return sum(positions, exec) / static_cast<double>(positions.size());
}

double empirical_moment(std::span<const double> positions, int p, const Execution& exec) {
  if (positions.empty()) throw std::invalid_argument("empirical_moment: empty ensemble");
  if (p < 0 || p % 2 != 0) throw std::invalid_argument("empirical_moment: p must be even and >= 0");
  if (exec.reduction == ReductionMode::Parallel && exec.threads > 1) {
    std::vector<double> powers(positions.size());
    parallel_for(positions.size(), exec.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) powers[i] = std::pow(positions[i], p);
    });
    return sum(powers, exec) / static_cast<double>(positions.size());
  }
  double s = 0.0;
  for (double x : positions) {
    double xp = 1.0;
    for (int k = 0; k < p; ++k) xp *= x;
    s += xp;
  }
  return s / static_cast<double>(positions.size());
}

double empirical_variance(std::span<const double> positions, const Execution& exec) {
  const double mean = empirical_mean(positions, exec);
  double s = 0.0;
  for (double x : positions) s += (x - mean) * (x - mean);
  return s / static_cast<double>(positions.size());
}

std::size_t bin_index(double x, double a, double b, std::size_t nbins) {
  if (!(x >= a)) return 0;  // also sends NaN to the first bin
  if (x >= b) return nbins - 1;
  const double n = static_cast<double>(nbins);
  auto edge = [&](std::size_t k) { return a + (b - a) * static_cast<double>(k) / n; };
  auto k = static_cast<std::size_t>((x - a) / (b - a) * n);
  if (k >= nbins) k = nbins - 1;
  // Floating-point division may land one bin off near an edge; settle against
  // the exact edge values.
  while (k + 1 < nbins && x >= edge(k + 1)) ++k;
  while (k > 0 && x < edge(k)) --k;
  return k;
}

HistogramDensity histogram(std::span<const double> positions, double a, double b,
                           std::size_t nbins) {
  if (nbins < 2) throw std::invalid_argument("histogram: nbins must be >= 2");
  if (!(a < b)) throw std::invalid_argument("histogram: need a < b");
  if (positions.empty()) throw std::invalid_argument("histogram: empty ensemble");
  std::vector<std::size_t> counts(nbins, 0);
  for (double x : positions) ++counts[bin_index(x, a, b, nbins)];
  HistogramDensity h{a, b, std::vector<double>(nbins)};
  const double inv_n = 1.0 / static_cast<double>(positions.size());
  for (std::size_t k = 0; k < nbins; ++k) h.masses[k] = static_cast<double>(counts[k]) * inv_n;
  return h;
}

}  // namespace mfl
