#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfl/density_types.hpp"
#include "mfl/ensemble.hpp"
#include "mfl/model.hpp"
#include "mfl/parallel.hpp"

namespace mfl {

enum class Scheme {
  /// X+ = X + B(X) h + sigma dW+
  Euler,
  /// X+ = X + B(X) h + (sigma/2)(dW + dW+), with dW = 0 on the first step.
  NonMarkovian,
  /// Hat state: Y+ = Y + sigma dW + B(Y + (sigma/2) dW) h; reports Y + (sigma/2) dW.
  Postprocessed,
};

std::string_view to_string(Scheme s);
/// Accepts "euler", "nm" / "non-markovian", "postprocessed" / "hat".
Scheme parse_scheme(std::string_view name);

/// Scratch buffers reused across steps.
struct StepWorkspace {
  std::vector<double> drift;
  std::vector<double> shifted;
};

// Single steps. `increments` holds dW_{m+1} for every particle; each step
// stores it in ens.prev_increments and advances ens.step_index.

void euler_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
                std::span<const double> increments, StepWorkspace& ws, const Execution& exec = {});
void nm_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
             std::span<const double> increments, StepWorkspace& ws, const Execution& exec = {});
void postprocessed_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
                        std::span<const double> increments, StepWorkspace& ws,
                        const Execution& exec = {});

void step(Scheme scheme, ParticleEnsemble& ens, const ModelSpec& model, double h,
          std::span<const double> increments, StepWorkspace& ws, const Execution& exec = {});

/// Convenience overloads that allocate their own workspace.
void euler_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
                std::span<const double> increments);
void nm_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
             std::span<const double> increments);
void postprocessed_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
                        std::span<const double> increments);

/// Positions approximating the particle system. Identity for Euler and NM;
/// hat state plus (sigma/2) dW_m for the postprocessed scheme.
std::vector<double> observed_positions(Scheme scheme, const ParticleEnsemble& ens, double sigma);

struct SchemeConfig {
  Scheme scheme = Scheme::NonMarkovian;
  double h = 0.01;
  std::size_t steps = 0;
  std::uint64_t seed = 1;
  GaussianLaw init{0.0, 1.0};
  std::size_t n_particles = 1000;
  /// Sample the Brownian path at h / noise_refinement and sum the pieces.
  /// Runs with equal seed and equal h / noise_refinement share one path.
  std::uint32_t noise_refinement = 1;
  /// Skip the h < min(1/(2 lambda), 1) precondition.
  bool unsafe_h = false;
  Execution exec{};
};

/// Largest admissible step for the model: min(1/(2 lambda), 1).
double max_stable_step(const ModelSpec& model);

/// Number of steps M with M h = T; rejects T/h further than 1e-9 from an integer.
std::size_t steps_for_horizon(double T, double h);

/// Throws ConfigError for an invalid configuration.
void validate(const SchemeConfig& cfg, const ModelSpec& model);

struct MomentSample {
  std::size_t step;
  double t;
  double mean;
  double second;
  double fourth;
};

struct Snapshot {
  std::size_t step;
  std::vector<double> positions;
};

/// What to record while stepping. Observers see observed_positions().
struct ObservationPlan {
  bool moment_trace = false;
  std::vector<std::size_t> snapshot_steps;
  std::function<void(Scheme, std::size_t step, double t, std::span<const double>)> on_step;
};

struct SimulationRecord {
  Scheme scheme = Scheme::NonMarkovian;
  double h = 0.0;
  std::size_t steps = 0;
  std::vector<double> initial_positions;
  std::vector<double> final_positions;
  std::vector<MomentSample> moments;
  std::vector<Snapshot> snapshots;
};

/// Runs cfg.steps steps of cfg.scheme from cfg.init.
SimulationRecord simulate(const SchemeConfig& cfg, const ModelSpec& model,
                          const ObservationPlan& plan = {});

/// Runs several schemes on the same initial sample and the same Brownian
/// increments (cfg.scheme is ignored).
std::vector<SimulationRecord> simulate_coupled(std::span<const Scheme> schemes,
                                               const SchemeConfig& cfg, const ModelSpec& model,
                                               const ObservationPlan& plan = {});

}  // namespace mfl
