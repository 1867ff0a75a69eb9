#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfl/density_types.hpp"
#include "mfl/integrators.hpp"
#include "mfl/metrics.hpp"
#include "mfl/model.hpp"

namespace mfl {

enum class Experiment {
  Simulate,
  StationaryError,
  Poc,
  WeakOrder,
  StrongOrder,
  VariationDecay,
  AssumptionsCheck,
};

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

enum class WeakReference {
  /// Euler at min(h) / ratio on independent noise.
  FineEuler,
  /// Closed-form law of the linear model at T.
  Exact,
};

enum class StationaryReference {
  /// Exact Gaussian for the linear model, fixed-point density otherwise.
  Auto,
  Exact,
  FixedPoint,
};

/// Every experiment parameter. Defaults give the linear model
/// (alpha = 0.5, sigma = 0.8) on a 72-bin histogram.
struct ExperimentConfig {
  Experiment experiment = Experiment::Simulate;

  // model.*
  std::string u_kind = "quadratic";  // quadratic | polynomial
  double u_curvature = 1.0;
  std::vector<double> u_coeffs;
  std::string v_kind = "quadratic";  // zero | quadratic | logcosh
  double alpha = 0.5;
  double beta = 1.0;
  double sigma = 0.8;

  // sim.*
  std::vector<std::size_t> n_particles{100000};
  std::vector<double> h{0.16};
  std::vector<double> T{8.64};
  std::vector<Scheme> schemes{Scheme::Euler, Scheme::NonMarkovian};
  std::uint64_t seed = 1;
  std::size_t replicates = 1;
  unsigned threads = 1;
  bool deterministic = true;
  bool unsafe_h = false;

  // init.*
  double init_mean = 0.0;
  double init_std = 1.0;

  // hist.*
  std::optional<double> a;
  std::optional<double> b;
  std::size_t nbins = 72;
  double mass_tol = 1e-6;

  // stationary.*
  StationaryReference stationary_reference = StationaryReference::Auto;
  bool series = false;

  // weak.*
  std::string weak_f = "positive-part";
  WeakReference weak_reference = WeakReference::FineEuler;
  std::size_t weak_ratio = 8;

  // strong.*
  std::size_t strong_ratio = 64;

  // decay.*
  int decay_p = 2;
  std::vector<double> decay_times{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::size_t mc_samples = 100;

  std::string output;

  ModelSpec model() const;
  GaussianLaw init() const { return GaussianLaw::from_std(init_mean, init_std); }
  TestFunction test_function() const { return parse_test_function(weak_f); }
};

/// Parses `key = value` lines. Blank lines and text after '#' are ignored;
/// list values are comma separated. Unknown, duplicate, empty and malformed
/// entries raise ConfigError naming the line. `experiment` is required.
ExperimentConfig parse_config(std::string_view text);

ExperimentConfig load_config(const std::string& path);

/// Text that parse_config maps back to `cfg`.
std::string emit_config(const ExperimentConfig& cfg);

/// Cross-field checks (T/h integrality, list lengths, experiment needs).
void validate(const ExperimentConfig& cfg);

}  // namespace mfl
