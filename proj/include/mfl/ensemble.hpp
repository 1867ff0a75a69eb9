#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfl/density_types.hpp"
#include "mfl/model.hpp"
#include "mfl/parallel.hpp"

namespace mfl {

/// Particle positions plus the Brownian increments of the last completed
/// step, which the non-Markovian scheme needs. prev_increments is all zeros
/// before the first step.
struct ParticleEnsemble {
  std::vector<double> positions;
  std::vector<double> prev_increments;
  std::size_t step_index = 0;

  ParticleEnsemble() = default;
  explicit ParticleEnsemble(std::vector<double> initial)
      : positions(std::move(initial)), prev_increments(positions.size(), 0.0) {}

  std::size_t size() const { return positions.size(); }
};

/// B_i(x) = -U'(x_i) - (1/N) sum_j V'(x_i - x_j).
///
/// Quadratic V uses B_i = -U'(x_i) - alpha (x_i - mean(x)) in O(N); zero V
/// skips the interaction; every other kind takes the O(N^2) pairwise loop.
void drift(const ModelSpec& model, std::span<const double> positions, std::span<double> out,
           const Execution& exec = {});
std::vector<double> drift(const ModelSpec& model, std::span<const double> positions,
                          const Execution& exec = {});

/// Always the O(N^2) pairwise loop, whatever the interaction kind.
void drift_pairwise(const ModelSpec& model, std::span<const double> positions,
                    std::span<double> out, const Execution& exec = {});

double sum(std::span<const double> values, const Execution& exec = {});
double empirical_mean(std::span<const double> positions, const Execution& exec = {});
/// (1/N) sum x_i^p for even p >= 0.
double empirical_moment(std::span<const double> positions, int p, const Execution& exec = {});
/// Mean-centered second moment (population variance).
double empirical_variance(std::span<const double> positions, const Execution& exec = {});

/// Bin k holds [edge(k), edge(k+1)); x < a goes to the first bin, x >= b to
/// the last one. Masses are counts / N.
HistogramDensity histogram(std::span<const double> positions, double a, double b,
                           std::size_t nbins);

/// Bin index under the convention above.
std::size_t bin_index(double x, double a, double b, std::size_t nbins);

}  // namespace mfl
