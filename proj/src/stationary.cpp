#include "mfl/stationary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mfl/errors.hpp"

namespace mfl {

GaussianLaw linear_model_stationary(double alpha, double sigma) {
  if (!(alpha > -1.0)) throw std::invalid_argument("linear_model_stationary: need alpha > -1");
  if (!(sigma > 0.0)) throw std::invalid_argument("linear_model_stationary: need sigma > 0");
  return {0.0, sigma * sigma / (2.0 * (alpha + 1.0))};
}

namespace {

std::vector<double> make_grid(const GridSpec& g) {
  if (g.points < 3 || !(g.lo < g.hi)) throw std::invalid_argument("grid needs >= 3 points and lo < hi");
  std::vector<double> x(g.points);
  const double dx = (g.hi - g.lo) / static_cast<double>(g.points - 1);
  for (std::size_t i = 0; i < g.points; ++i) x[i] = g.lo + dx * static_cast<double>(i);
  return x;
}

void normalize(GridDensity& d) {
  const double z = d.trapezoid_integral();
  if (!(z > 0.0) || !std::isfinite(z)) throw NumericalError("density cannot be normalized");
  for (double& v : d.values) v /= z;
}

// Normalize(exp(-(2/sigma^2) (U + conv))) on the grid.
GridDensity gibbs_map(const std::vector<double>& grid, double spacing,
                      const std::vector<double>& u_values, const std::vector<double>& conv,
                      double sigma) {
  const double beta = 2.0 / (sigma * sigma);
  std::vector<double> energy(grid.size());
  double emin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    energy[i] = beta * (u_values[i] + (conv.empty() ? 0.0 : conv[i]));
    emin = std::min(emin, energy[i]);
  }
  GridDensity d{grid, std::vector<double>(grid.size()), spacing};
  for (std::size_t i = 0; i < grid.size(); ++i) d.values[i] = std::exp(-(energy[i] - emin));
  normalize(d);
  return d;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

GridSpec default_grid(const ModelSpec& model) {
  if (!(model.sigma() > 0.0)) throw std::invalid_argument("default_grid: need sigma > 0");
  // Locate the well of U on the validation grid, then resolve
  // exp(-2U/sigma^2) on a generous window around it.
  const auto vg = validation_grid();
  double centre = vg.front();
  for (double x : vg) {
    if (potential_u(model, x) < potential_u(model, centre)) centre = x;
  }
  const double lambda = std::max(model.lambda(), 1e-6);
  const double width = 20.0 * model.sigma() / std::sqrt(2.0 * lambda) + 1.0;
  const GridSpec wide{centre - width, centre + width, 8193};
  const auto grid = make_grid(wide);
  std::vector<double> u_values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) u_values[i] = potential_u(model, grid[i]);
  const GridDensity confining =
      gibbs_map(grid, grid[1] - grid[0], u_values, {}, model.sigma());
  const Domain d = choose_domain(confining, 1e-9);
  const double mid = 0.5 * (d.a + d.b);
  const double half = 0.75 * (d.b - d.a);
  return {mid - half, mid + half, 2048};
}

FixedPointResult fixed_point_density(const ModelSpec& model, const GridSpec& spec,
                                     const FixedPointOptions& opts) {
  if (!(model.sigma() > 0.0)) throw std::invalid_argument("fixed_point_density: need sigma > 0");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw std::invalid_argument("fixed_point_density: damping must lie in (0, 1]");
  }
  if (!(opts.tol > 0.0) || opts.max_iter < 1) {
    throw std::invalid_argument("fixed_point_density: need tol > 0 and max_iter >= 1");
  }
  const auto grid = make_grid(spec);
  const std::size_t G = grid.size();
  const double dx = grid[1] - grid[0];

  std::vector<double> u_values(G);
  for (std::size_t i = 0; i < G; ++i) u_values[i] = potential_u(model, grid[i]);

  // V(x_i - x_j) depends on i - j only.
  const bool interacting = !model.has_zero_interaction();
  std::vector<double> v_offsets;
  if (interacting) {
    v_offsets.resize(2 * G - 1);
    for (std::size_t k = 0; k < 2 * G - 1; ++k) {
      const double offset = (static_cast<double>(k) - static_cast<double>(G - 1)) * dx;
      v_offsets[k] = potential_v(model, offset);
    }
  }
  auto convolve = [&](const std::vector<double>& mu) {
    std::vector<double> conv;
    if (!interacting) return conv;
    conv.assign(G, 0.0);
    std::vector<double> weighted(G);
    for (std::size_t j = 0; j < G; ++j) {
      weighted[j] = mu[j] * dx * ((j == 0 || j + 1 == G) ? 0.5 : 1.0);
    }
    for (std::size_t i = 0; i < G; ++i) {
      const double* v = v_offsets.data() + (i + G - 1);  // v[-j] = V(x_i - x_j)
      double s = 0.0;
      for (std::size_t j = 0; j < G; ++j) s += v[-static_cast<std::ptrdiff_t>(j)] * weighted[j];
      conv[i] = s;
    }
    return conv;
  };

  FixedPointResult result;
  result.density = gibbs_map(grid, dx, u_values, {}, model.sigma());
  std::vector<double>& mu = result.density.values;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const GridDensity target = gibbs_map(grid, dx, u_values, convolve(mu), model.sigma());
    std::vector<double> next(G);
    for (std::size_t i = 0; i < G; ++i) {
      next[i] = (1.0 - opts.damping) * mu[i] + opts.damping * target.values[i];
    }
    result.last_change = sup_diff(next, mu);
    mu = std::move(next);
    result.iterations = it;
    if (result.last_change < opts.tol) {
      const GridDensity check = gibbs_map(grid, dx, u_values, convolve(mu), model.sigma());
      result.residual = sup_diff(check.values, mu);
      return result;
    }
  }
  std::ostringstream os;
  os << "fixed_point_density: no convergence after " << opts.max_iter
     << " iterations (last change " << result.last_change << ")";
  throw NumericalError(os.str());
}

Domain choose_domain(const GaussianLaw& law, double mass_tol) {
  if (!(mass_tol > 0.0 && mass_tol < 1.0)) throw std::invalid_argument("mass_tol must lie in (0, 1)");
  const double s = law.stddev();
  if (!(s > 0.0)) return {law.mean, law.mean};
  // Outside mass of [mean - w, mean + w] is erfc(w / (s sqrt 2)); bisect on w.
  auto outside = [&](double w) { return std::erfc(w / (s * std::numbers::sqrt2)); };
  double lo = 0.0;
  double hi = 40.0 * s;
  if (!(outside(hi) < mass_tol)) throw NumericalError("choose_domain: mass target out of range");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (outside(mid) < mass_tol ? hi : lo) = mid;
  }
  return {law.mean - hi, law.mean + hi};
}

Domain choose_domain(const GridDensity& d, double mass_tol) {
  if (!(mass_tol > 0.0 && mass_tol < 1.0)) throw std::invalid_argument("mass_tol must lie in (0, 1)");
  const std::size_t G = d.values.size();
  if (G < 2) throw NumericalError("choose_domain: grid too small");
  // prefix[k] = trapezoid mass of [x_0, x_k]
  std::vector<double> prefix(G, 0.0);
  for (std::size_t k = 1; k < G; ++k) {
    prefix[k] = prefix[k - 1] + 0.5 * d.spacing * (d.values[k - 1] + d.values[k]);
  }
  const double total = prefix.back();
  const std::size_t m = d.mode_index();
  for (std::size_t k = 0; m >= k && m + k < G; ++k) {
    const double mass = (prefix[m + k] - prefix[m - k]) / total;
    if (mass > 1.0 - mass_tol) return {d.grid[m - k], d.grid[m + k]};
  }
  throw NumericalError("choose_domain: grid too small to enclose the requested mass");
}

namespace {

struct GaussLegendre {
  static constexpr int kOrder = 10;
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};

  GaussLegendre() {
    for (int i = 0; i < kOrder; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int n = 2; n <= kOrder; ++n) {
          const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
          p0 = p1;
          p1 = p2;
        }
        dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  double apply(const std::function<double(double)>& f, double lo, double hi) const {
    const double c = 0.5 * (lo + hi);
    const double r = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < kOrder; ++i) s += weights[i] * f(c + r * nodes[i]);
    return s * r;
  }
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre rule;
  return rule;
}

double adaptive(const std::function<double(double)>& f, double lo, double hi, double whole,
                double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double left = gauss_legendre().apply(f, lo, mid);
  const double right = gauss_legendre().apply(f, mid, hi);
  if (depth >= 40 || std::abs(left + right - whole) <= tol) return left + right;
  return adaptive(f, lo, mid, left, 0.5 * tol, depth + 1) +
         adaptive(f, mid, hi, right, 0.5 * tol, depth + 1);
}

HistogramDensity empty_histogram(double a, double b, std::size_t nbins) {
  if (!(a < b)) throw std::invalid_argument("reference_bin_masses: need a < b");
  if (nbins < 1) throw std::invalid_argument("reference_bin_masses: need nbins >= 1");
  return {a, b, std::vector<double>(nbins, 0.0)};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (hi == lo) return 0.0;
  if (hi < lo) return -integrate(f, hi, lo, tol);
  return adaptive(f, lo, hi, gauss_legendre().apply(f, lo, hi), tol, 0);
}

HistogramDensity reference_bin_masses(const GaussianLaw& law, double a, double b,
                                      std::size_t nbins) {
  HistogramDensity h = empty_histogram(a, b, nbins);
  const std::function<double(double)> pdf = [&](double x) { return law.pdf(x); };
  for (std::size_t k = 0; k < nbins; ++k) {
    h.masses[k] = integrate(pdf, h.edge(k), h.edge(k + 1), 1e-14);
  }
  h.masses.front() += law.cdf(a);
  h.masses.back() += law.upper_tail(b);
  return h;
}

namespace {

// Exact integral over [lo, hi] of the linear interpolant, zero off the grid.
double integrate_linear(const GridDensity& d, double lo, double hi) {
  lo = std::max(lo, d.grid.front());
  hi = std::min(hi, d.grid.back());
  if (!(hi > lo)) return 0.0;
  const auto first = static_cast<std::size_t>((lo - d.grid.front()) / d.spacing);
  double s = 0.0;
  for (std::size_t k = first == 0 ? 0 : first - 1; k + 1 < d.grid.size(); ++k) {
    const double l = std::max(lo, d.grid[k]);
    const double r = std::min(hi, d.grid[k + 1]);
    if (d.grid[k] >= hi) break;
    if (!(r > l)) continue;
    const double span = d.grid[k + 1] - d.grid[k];
    auto value = [&](double x) {
      const double t = (x - d.grid[k]) / span;
      return (1.0 - t) * d.values[k] + t * d.values[k + 1];
    };
    s += 0.5 * (r - l) * (value(l) + value(r));
  }
  return s;
}

}  // namespace

HistogramDensity reference_bin_masses(const GridDensity& density, double a, double b,
                                      std::size_t nbins) {
  HistogramDensity h = empty_histogram(a, b, nbins);
  for (std::size_t k = 0; k < nbins; ++k) {
    h.masses[k] = integrate_linear(density, h.edge(k), h.edge(k + 1));
  }
  h.masses.front() += integrate_linear(density, density.grid.front(), a);
  h.masses.back() += integrate_linear(density, b, density.grid.back());
  return h;
}

HistogramDensity reference_bin_masses(const std::function<double(double)>& pdf,
                                      double support_lo, double support_hi, double a, double b,
                                      std::size_t nbins) {
  HistogramDensity h = empty_histogram(a, b, nbins);
  auto clipped = [&](double lo, double hi) {
    lo = std::max(lo, support_lo);
    hi = std::min(hi, support_hi);
    return hi > lo ? integrate(pdf, lo, hi, 1e-14) : 0.0;
  };
  for (std::size_t k = 0; k < nbins; ++k) h.masses[k] = clipped(h.edge(k), h.edge(k + 1));
  h.masses.front() += clipped(support_lo, a);
  h.masses.back() += clipped(b, support_hi);
  return h;
}

}  // namespace mfl
