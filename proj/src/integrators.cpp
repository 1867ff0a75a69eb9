#include "mfl/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfl/errors.hpp"
#include "mfl/rng.hpp"

namespace mfl {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Euler: return "euler";
    case Scheme::NonMarkovian: return "nm";
    case Scheme::Postprocessed: return "postprocessed";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "euler") return Scheme::Euler;
  if (name == "nm" || name == "non-markovian") return Scheme::NonMarkovian;
  if (name == "postprocessed" || name == "hat") return Scheme::Postprocessed;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

namespace {

void check_sizes(const ParticleEnsemble& ens, std::span<const double> increments) {
  if (ens.positions.size() != ens.prev_increments.size() ||
      increments.size() != ens.positions.size()) {
    throw std::invalid_argument("step: increment count does not match ensemble size");
  }
}

void finish_step(ParticleEnsemble& ens, std::span<const double> increments) {
  std::copy(increments.begin(), increments.end(), ens.prev_increments.begin());
  ++ens.step_index;
}

}  // namespace

void euler_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
                std::span<const double> dw, StepWorkspace& ws, const Execution& exec) {
  check_sizes(ens, dw);
  ws.drift.resize(ens.size());
  drift(model, ens.positions, ws.drift, exec);
  const double sigma = model.sigma();
  auto& x = ens.positions;
  parallel_for(x.size(), exec.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) x[i] += ws.drift[i] * h + sigma * dw[i];
  });
  finish_step(ens, dw);
}

void nm_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
             std::span<const double> dw, StepWorkspace& ws, const Execution& exec) {
  check_sizes(ens, dw);
  ws.drift.resize(ens.size());
  drift(model, ens.positions, ws.drift, exec);
  const double half_sigma = 0.5 * model.sigma();
  auto& x = ens.positions;
  const auto& prev = ens.prev_increments;
  parallel_for(x.size(), exec.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      x[i] += ws.drift[i] * h + half_sigma * (prev[i] + dw[i]);
    }
  });
  finish_step(ens, dw);
}

void postprocessed_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
                        std::span<const double> dw, StepWorkspace& ws, const Execution& exec) {
  check_sizes(ens, dw);
  const double sigma = model.sigma();
  const double half_sigma = 0.5 * sigma;
  auto& y = ens.positions;
  const auto& prev = ens.prev_increments;
  ws.shifted.resize(ens.size());
  ws.drift.resize(ens.size());
  for (std::size_t i = 0; i < y.size(); ++i) ws.shifted[i] = y[i] + half_sigma * prev[i];
  drift(model, ws.shifted, ws.drift, exec);
  parallel_for(y.size(), exec.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) y[i] += sigma * prev[i] + ws.drift[i] * h;
  });
  finish_step(ens, dw);
}

void step(Scheme scheme, ParticleEnsemble& ens, const ModelSpec& model, double h,
          std::span<const double> dw, StepWorkspace& ws, const Execution& exec) {
  switch (scheme) {
    case Scheme::Euler: return euler_step(ens, model, h, dw, ws, exec);
    case Scheme::NonMarkovian: return nm_step(ens, model, h, dw, ws, exec);
    case Scheme::Postprocessed: return postprocessed_step(ens, model, h, dw, ws, exec);
  }
}

void euler_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
                std::span<const double> dw) {
  StepWorkspace ws;
  euler_step(ens, model, h, dw, ws);
}

void nm_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
             std::span<const double> dw) {
  StepWorkspace ws;
  nm_step(ens, model, h, dw, ws);
}

void postprocessed_step(ParticleEnsemble& ens, const ModelSpec& model, double h,
                        std::span<const double> dw) {
  StepWorkspace ws;
  postprocessed_step(ens, model, h, dw, ws);
}

std::vector<double> observed_positions(Scheme scheme, const ParticleEnsemble& ens, double sigma) {
  std::vector<double> out = ens.positions;
  if (scheme == Scheme::Postprocessed) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += 0.5 * sigma * ens.prev_increments[i];
  }
  return out;
}

double max_stable_step(const ModelSpec& model) {
  const double lambda = model.lambda();
  return lambda > 0.0 ? std::min(1.0 / (2.0 * lambda), 1.0) : 1.0;
}

std::size_t steps_for_horizon(double T, double h) {
  if (!(h > 0.0)) throw ConfigError("time step h must be positive");
  if (!(T >= 0.0)) throw ConfigError("horizon T must be non-negative");
  const double ratio = T / h;
  const double m = std::round(ratio);
  if (std::abs(ratio - m) >= 1e-9) {
    std::ostringstream os;
    os << "horizon T=" << T << " is not an integer multiple of h=" << h;
    throw ConfigError(os.str());
  }
  return static_cast<std::size_t>(m);
}

void validate(const SchemeConfig& cfg, const ModelSpec& model) {
  if (!(cfg.h > 0.0)) throw ConfigError("time step h must be positive");
  if (cfg.n_particles == 0) throw ConfigError("need at least one particle");
  if (!(cfg.init.variance >= 0.0)) throw ConfigError("initial law variance must be >= 0");
  if (cfg.noise_refinement == 0 || (cfg.noise_refinement & (cfg.noise_refinement - 1)) != 0) {
    throw ConfigError("noise_refinement must be a power of two");
  }
  if (cfg.steps > 0xFFFFFFFFull / cfg.noise_refinement) {
    throw ConfigError("too many steps for the 32-bit step counter");
  }
  const double bound = max_stable_step(model);
  if (!cfg.unsafe_h && !(cfg.h < bound)) {
    std::ostringstream os;
    os << "time step h=" << cfg.h << " violates h < min(1/(2 lambda), 1) = " << bound
       << " (pass the unsafe-h override to run anyway)";
    throw ConfigError(os.str());
  }
}

std::vector<SimulationRecord> simulate_coupled(std::span<const Scheme> schemes,
                                               const SchemeConfig& cfg, const ModelSpec& model,
                                               const ObservationPlan& plan) {
  validate(cfg, model);
  const double h_fine = cfg.h / static_cast<double>(cfg.noise_refinement);
  const NoiseSource noise(cfg.seed, h_fine, cfg.noise_refinement);
  const std::vector<double> x0 = noise.initial_positions(cfg.n_particles, cfg.init);

  std::vector<ParticleEnsemble> ensembles(schemes.size(), ParticleEnsemble(x0));
  std::vector<SimulationRecord> records(schemes.size());
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    records[s].scheme = schemes[s];
    records[s].h = cfg.h;
    records[s].steps = cfg.steps;
    records[s].initial_positions = x0;
  }

  std::vector<std::size_t> snap_steps = plan.snapshot_steps;
  std::sort(snap_steps.begin(), snap_steps.end());
  const bool need_view = plan.moment_trace || !snap_steps.empty() || plan.on_step;

  auto observe = [&](std::size_t m) {
    if (!need_view) return;
    const double t = static_cast<double>(m) * cfg.h;
    const bool snap = std::binary_search(snap_steps.begin(), snap_steps.end(), m);
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      const std::vector<double> view = observed_positions(schemes[s], ensembles[s], model.sigma());
      if (plan.moment_trace) {
        records[s].moments.push_back({m, t, empirical_mean(view, cfg.exec),
                                      empirical_moment(view, 2, cfg.exec),
                                      empirical_moment(view, 4, cfg.exec)});
      }
      if (snap) records[s].snapshots.push_back({m, view});
      if (plan.on_step) plan.on_step(schemes[s], m, t, view);
    }
  };

  observe(0);
  StepWorkspace ws;
  std::vector<double> dw(cfg.n_particles);
  for (std::size_t m = 0; m < cfg.steps; ++m) {
    noise.fill_increments(0, static_cast<std::uint32_t>(m), cfg.noise_refinement, dw);
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      step(schemes[s], ensembles[s], model, cfg.h, dw, ws, cfg.exec);
    }
    observe(m + 1);
  }

  for (std::size_t s = 0; s < schemes.size(); ++s) {
    records[s].final_positions = observed_positions(schemes[s], ensembles[s], model.sigma());
    for (double x : records[s].final_positions) {
      if (!std::isfinite(x)) {
        throw NumericalError("simulation diverged (non-finite particle position)");
      }
    }
  }
  return records;
}

SimulationRecord simulate(const SchemeConfig& cfg, const ModelSpec& model,
                          const ObservationPlan& plan) {
  const Scheme schemes[] = {cfg.scheme};
  return std::move(simulate_coupled(schemes, cfg, model, plan).front());
}

}  // namespace mfl
