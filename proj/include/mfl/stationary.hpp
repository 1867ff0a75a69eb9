#pragma once

#include <cstddef>
#include <functional>

#include "mfl/density_types.hpp"
#include "mfl/model.hpp"

namespace mfl {

/// Invariant law of the linear mean-field example (U = x^2/2, V = alpha x^2/2):
/// density proportional to exp(-(alpha + 1) x^2 / sigma^2), i.e.
/// N(0, sigma^2 / (2 (alpha + 1))).
GaussianLaw linear_model_stationary(double alpha, double sigma);

struct GridSpec {
  double lo = -5.0;
  double hi = 5.0;
  std::size_t points = 2048;
};

struct FixedPointOptions {
  double tol = 1e-10;
  int max_iter = 1000;
  double damping = 0.5;
};

struct FixedPointResult {
  GridDensity density;
  int iterations = 0;
  /// Sup-norm change of the final iteration.
  double last_change = 0.0;
  /// sup |mu - Normalize(exp(-(2/sigma^2)(U + V * mu)))| at return.
  double residual = 0.0;
};

/// Grid used when none is given: 2048 points over choose_domain(., 1e-9) of
/// exp(-2U/sigma^2), widened by 50%.
GridSpec default_grid(const ModelSpec& model);

/// Damped Picard iteration for the self-consistent stationary density
///   mu = Normalize(exp(-(2/sigma^2) (U + V * mu)))
/// starting from Normalize(exp(-2U/sigma^2)). The convolution is direct
/// trapezoid quadrature on the grid. Throws NumericalError if the sup-norm
/// change is still >= tol after max_iter iterations.
FixedPointResult fixed_point_density(const ModelSpec& model, const GridSpec& grid,
                                     const FixedPointOptions& opts = {});

struct Domain {
  double a = 0.0;
  double b = 0.0;
};

/// Smallest interval symmetric about the mode holding mass > 1 - mass_tol.
Domain choose_domain(const GaussianLaw& law, double mass_tol);
/// Grid version: the interval endpoints are grid points; throws NumericalError
/// when the grid ends before the target mass is reached.
Domain choose_domain(const GridDensity& density, double mass_tol);

/// Per-bin probabilities of `law` on nbins equal bins of [a, b] with the
/// tails lumped into the end bins. Bins are integrated by adaptive
/// Gauss-Legendre quadrature; the tails use the closed-form CDF.
HistogramDensity reference_bin_masses(const GaussianLaw& law, double a, double b,
                                      std::size_t nbins);

/// Grid density: exact integrals of its piecewise-linear interpolant.
HistogramDensity reference_bin_masses(const GridDensity& density, double a, double b,
                                      std::size_t nbins);

/// Arbitrary density vanishing outside [support_lo, support_hi].
HistogramDensity reference_bin_masses(const std::function<double(double)>& pdf,
                                      double support_lo, double support_hi, double a, double b,
                                      std::size_t nbins);

/// Adaptive Gauss-Legendre quadrature to absolute tolerance `tol`.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-13);

}  // namespace mfl
