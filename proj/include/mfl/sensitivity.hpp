#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mfl/density_types.hpp"
#include "mfl/metrics.hpp"
#include "mfl/model.hpp"

namespace mfl {

/// A(i, l) = dB_i / dx_l at x.
Eigen::MatrixXd drift_jacobian(const ModelSpec& model, std::span<const double> x);

/// Pathwise derivative J(i, j) = dX^i_s / dx_j of the particle flow,
///   dJ/ds = A(X_s) J,  J(t) = I,
/// integrated with explicit Euler (A at the left end point).
class FirstVariation {
 public:
  static constexpr std::size_t kMaxParticles = 1024;

  explicit FirstVariation(std::size_t n);

  void advance(const ModelSpec& model, std::span<const double> x, double h);

  std::size_t size() const { return static_cast<std::size_t>(j_.rows()); }
  const Eigen::MatrixXd& matrix() const { return j_; }
  double operator()(std::size_t i, std::size_t j) const { return j_(i, j); }

 private:
  Eigen::MatrixXd j_;
  Eigen::MatrixXd scratch_;
};

/// K(i, j, k) = d^2 X^i_s / dx_j dx_k, solving
///   dK_ijk/ds = sum_l A_il K_ljk + sum_{l,l'} d^2B_i/dx_l dx_l' J_lj J_l'k,
/// K(t) = 0, with the same explicit Euler rule.
class SecondVariation {
 public:
  static constexpr std::size_t kMaxParticles = 32;

  explicit SecondVariation(std::size_t n);

  /// One step using J at the same left end point (call before advancing J).
  void advance(const ModelSpec& model, std::span<const double> x, const FirstVariation& jac,
               double h);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(j * n_ + k) * n_ + i];
  }
  double max_abs() const;

 private:
  std::size_t n_;
  std::vector<double> data_;  // (j, k) major, i fastest: column (j,k) is contiguous
};

/// sum_{l,l'} d^2B_i/dx_l dx_l'(x) J_lj J_l'k for all (i, j, k), same layout
/// as SecondVariation.
std::vector<double> second_order_source(const ModelSpec& model, std::span<const double> x,
                                        const Eigen::MatrixXd& jac);

/// Integrates J along path[0..M] (positions at t_0..t_M), M = path.size() - 1.
FirstVariation first_variation_evolve(const ModelSpec& model,
                                      std::span<const std::vector<double>> path, double h);

/// Integrates (J, K) jointly along the path; returns K at t_M.
SecondVariation second_variation_evolve(const ModelSpec& model,
                                        std::span<const std::vector<double>> path, double h);

/// Standard normals for Monte Carlo replica `replica`: index m * n + i holds
/// the draw for particle i on step m. Replicas are independent streams.
void replica_normals(std::uint64_t seed, std::uint32_t replica, std::size_t n, std::size_t steps,
                     std::span<double> out);

/// Initial positions for a replica (i.i.d. draws from `law`).
std::vector<double> replica_initial_positions(std::uint64_t seed, std::uint32_t replica,
                                              std::size_t n, const GaussianLaw& law);

struct DecayOptions {
  std::size_t n_particles = 10;
  std::size_t mc_samples = 100;
  int p = 2;
  /// Times s - t at which the sums are recorded; multiples of h, ascending.
  std::vector<double> times;
  double h = 1e-3;
  std::uint64_t seed = 1;
  GaussianLaw init{0.0, 1.0};
  /// Replicas are split across this many workers; results do not depend on it.
  unsigned threads = 1;
};

struct DecaySummary {
  std::size_t n_particles = 0;
  int p = 2;
  std::vector<double> times;
  /// (1/N) sum_j sum_i E|J_ij|^p  (column sums, averaged over columns)
  std::vector<double> column_sum;
  /// (1/N) sum_j sum_{i != j} E|J_ij|^p
  std::vector<double> off_diagonal_sum;
  /// Largest Monte Carlo standard error over all recorded column sums.
  double max_std_error = 0.0;
  /// -slope of log(column_sum) vs time over the whole grid.
  double column_rate = 0.0;
  /// Same fit restricted to the second half of the grid (slowest mode).
  double column_tail_rate = 0.0;
  /// -slope of log(off_diagonal_sum) vs time over times > 0.
  double off_diagonal_rate = 0.0;
};

/// Monte Carlo estimates of the column and off-diagonal p-th moment sums of
/// J along Euler paths of the particle system started from `init`.
DecaySummary variation_decay_summary(const ModelSpec& model, const DecayOptions& opts);

struct DecaySweep {
  std::vector<DecaySummary> runs;
  /// Fitted power of N of the off-diagonal sum at each recorded time > 0.
  std::vector<double> off_diagonal_power;
  /// The power at the final time.
  double final_off_diagonal_power = 0.0;
};

DecaySweep variation_decay_sweep(const ModelSpec& model, const DecayOptions& opts,
                                 std::span<const std::size_t> particle_counts);

struct GradientEstimate {
  std::vector<double> mean;
  std::vector<double> std_error;
  double u_mean = 0.0;
  double u_std_error = 0.0;
};

struct GradientOptions {
  std::size_t mc_samples = 10000;
  std::uint64_t seed = 1;
  double h = 0.01;
  unsigned threads = 1;
};

/// Monte Carlo estimate of d/dx_j u(t, x), u(t, x) = E[g(X_T) | X_t = x],
/// g(x) = (1/N) sum_i f(x_i), via E[sum_i (f'(X_T^i)/N) J_ij(T)]. Paths are
/// Euler discretizations with step opts.h; T - t must be a multiple of h.
GradientEstimate u_gradient_mc(const ModelSpec& model, const TestFunction& f, double t,
                               std::span<const double> x, double T,
                               const GradientOptions& opts = {});

}  // namespace mfl
