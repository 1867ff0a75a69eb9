#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfl/config.hpp"
#include "mfl/density_types.hpp"
#include "mfl/integrators.hpp"
#include "mfl/metrics.hpp"
#include "mfl/model.hpp"
#include "mfl/sensitivity.hpp"
#include "mfl/stationary.hpp"

namespace mfl {

/// Binned stationary law used as the "true" histogram.
struct StationaryTarget {
  std::string kind;  // "exact" or "fixed-point"
  Domain domain;
  HistogramDensity masses;
};

/// Reference bins on hist.a/hist.b, or on choose_domain(reference, mass_tol)
/// when the config leaves the domain open.
StationaryTarget stationary_target(const ExperimentConfig& cfg);

/// Law of the linear-type model (quadratic U, quadratic or zero V) at time T
/// started from `init`: mean m0 e^{-cT}, variance
/// v0 e^{-2(c+alpha)T} + sigma^2 / (2(c+alpha)) (1 - e^{-2(c+alpha)T}).
GaussianLaw linear_model_law(const ModelSpec& model, const GaussianLaw& init, double T);

/// E f(X) for X ~ law.
double gaussian_expectation(const GaussianLaw& law, const TestFunction& f);

/// Rows for every (N, h, T, replicate, scheme); replicate r uses seed + r.
/// With cfg.series the rows cover every step, T holding the step time.
std::vector<ErrorReport> run_stationary_error(const ExperimentConfig& cfg);

struct SlopeFit {
  Scheme scheme;
  RegressionFit fit;
};

struct PocResult {
  std::vector<ErrorReport> reports;
  /// L2 error (replicate mean) against N.
  std::vector<SlopeFit> l2_slopes;
};

PocResult run_poc(const ExperimentConfig& cfg);

struct WeakRow {
  Scheme scheme;
  std::size_t n_particles;
  double h;
  double T;
  std::uint64_t seed;
  std::size_t replicates;
  std::string f;
  std::string reference;
  double value;            // replicate mean of (1/N) sum f(X_T^i)
  double reference_value;  // replicate mean of the reference functional
  double weak_error;       // |value - reference_value|
  double std_error;        // of the replicate differences
};

struct WeakOrderResult {
  std::vector<WeakRow> rows;
  std::vector<SlopeFit> slopes;
};

/// |E f(X_T^h) - E f(reference)| for each h; the reference is either an
/// Euler run at min(h) / weak.ratio on independent noise or the closed-form
/// law of the linear model.
WeakOrderResult run_weak_order(const ExperimentConfig& cfg);

struct StrongRow {
  Scheme scheme;
  std::size_t n_particles;
  double h;
  double T;
  std::uint64_t seed;
  double reference_h;
  double strong_error;
};

struct StrongOrderResult {
  std::vector<StrongRow> rows;
  std::vector<SlopeFit> slopes;
};

/// Coarse runs against Euler at h / strong.ratio on the same Brownian path.
StrongOrderResult run_strong_order(const ExperimentConfig& cfg);

struct DecayResult {
  DecaySweep sweep;  // a single N gives one run and no power fit
  /// max |J(t) - I| over the runs (zero by construction).
  double identity_error = 0.0;
};

DecayResult run_variation_decay(const ExperimentConfig& cfg);

AssumptionReport run_assumptions_check(const ExperimentConfig& cfg);

struct SimulateRun {
  std::size_t n_particles;
  double T;
  std::uint64_t seed;
  std::vector<SimulationRecord> records;  // one per scheme
};

/// Moment traces for every (N, h, T, replicate).
std::vector<SimulateRun> run_simulate(const ExperimentConfig& cfg);

// CSV output: 17 significant digits, LF line endings.

/// Header scheme,N,h,T,seed,a,b,nbins,entropy_error,l2_error.
void write_csv(std::ostream& os, const std::vector<ErrorReport>& reports);
void write_csv(std::ostream& os, const WeakOrderResult& r);
void write_csv(std::ostream& os, const StrongOrderResult& r);
void write_csv(std::ostream& os, const DecayResult& r);
void write_csv(std::ostream& os, const AssumptionReport& r);
void write_csv(std::ostream& os, const std::vector<SimulateRun>& runs);

/// write_csv(reports) into `path`.
void emit_csv(const std::vector<ErrorReport>& reports, const std::string& path);

std::string format_real(double v);

}  // namespace mfl
