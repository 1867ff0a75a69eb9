#include "mfl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>

#include "mfl/ensemble.hpp"
#include "mfl/errors.hpp"

namespace mfl {

namespace {

Execution execution(const ExperimentConfig& cfg) {
  return {std::max(cfg.threads, 1u),
          cfg.deterministic ? ReductionMode::Deterministic : ReductionMode::Parallel};
}

SchemeConfig scheme_config(const ExperimentConfig& cfg, std::size_t n, double h, double T,
                           std::uint64_t seed) {
  SchemeConfig sc;
  sc.h = h;
  sc.steps = steps_for_horizon(T, h);
  sc.seed = seed;
  sc.init = cfg.init();
  sc.n_particles = n;
  sc.unsafe_h = cfg.unsafe_h;
  sc.exec = execution(cfg);
  return sc;
}

/// Quadratic U with quadratic or zero V: the mean-field law stays Gaussian.
bool is_linear_type(const ModelSpec& model) {
  return std::holds_alternative<QuadraticPotential>(model.confining()) &&
         (model.has_quadratic_interaction() || model.has_zero_interaction());
}

double curvature(const ModelSpec& model) {
  return std::get<QuadraticPotential>(model.confining()).curvature;
}

std::vector<SlopeFit> fit_by_scheme(std::span<const Scheme> schemes,
                                    const std::vector<std::pair<Scheme, LogPoint>>& pts) {
  std::vector<SlopeFit> out;
  for (Scheme s : schemes) {
    std::vector<LogPoint> mine;
    for (const auto& [scheme, p] : pts) {
      if (scheme == s) mine.push_back(p);
    }
    if (mine.size() < 2) continue;
    out.push_back({s, regression_slope(mine)});
  }
  return out;
}

ErrorReport make_report(const ExperimentConfig& cfg, const StationaryTarget& target, Scheme s,
                        std::size_t n, double h, double t, std::uint64_t seed,
                        std::span<const double> positions) {
  const HistogramDensity proxy =
      histogram(positions, target.domain.a, target.domain.b, cfg.nbins);
  ErrorReport r;
  r.scheme = std::string(to_string(s));
  r.n_particles = n;
  r.h = h;
  r.T = t;
  r.seed = seed;
  r.a = target.domain.a;
  r.b = target.domain.b;
  r.nbins = cfg.nbins;
  r.entropy_error = relative_entropy(target.masses, proxy, n);
  r.l2_error = l2_error(target.masses, proxy);
  r.notes = target.kind;
  return r;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GaussianLaw linear_model_law(const ModelSpec& model, const GaussianLaw& init, double T) {
  if (!is_linear_type(model)) {
    throw ConfigError("closed-form law needs quadratic U and quadratic or zero V");
  }
  const double c = curvature(model);
  const double k = c + model.interaction_alpha();
  const double s2 = model.sigma() * model.sigma();
  const double decay = std::exp(-2.0 * k * T);
  return {init.mean * std::exp(-c * T), init.variance * decay + s2 / (2.0 * k) * (1.0 - decay)};
}

double gaussian_expectation(const GaussianLaw& law, const TestFunction& f) {
  const double m = law.mean;
  const double s = law.stddev();
  switch (f.kind) {
    case TestFunction::Kind::Identity: return m;
    case TestFunction::Kind::Square: return m * m + s * s;
    case TestFunction::Kind::PositivePart: {
      if (s == 0.0) return std::max(m, 0.0);
      const double z = m / s;
      const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
      const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
      return m * cdf + s * phi;
    }
    case TestFunction::Kind::Table: break;
  }
  if (s == 0.0) return f.value(m);
  return integrate([&](double x) { return f.value(x) * law.pdf(x); }, m - 12.0 * s, m + 12.0 * s,
                   1e-12);
}

StationaryTarget stationary_target(const ExperimentConfig& cfg) {
  const ModelSpec model = cfg.model();
  StationaryReference kind = cfg.stationary_reference;
  if (kind == StationaryReference::Auto) {
    kind = is_linear_type(model) ? StationaryReference::Exact : StationaryReference::FixedPoint;
  }
  StationaryTarget t;
  if (kind == StationaryReference::Exact) {
    if (!is_linear_type(model) || !(model.sigma() > 0.0)) {
      throw ConfigError("exact stationary reference needs the linear model with sigma > 0");
    }
    const double k = curvature(model) + model.interaction_alpha();
    const GaussianLaw law{0.0, model.sigma() * model.sigma() / (2.0 * k)};
    t.kind = "exact";
    t.domain = cfg.a ? Domain{*cfg.a, *cfg.b} : choose_domain(law, cfg.mass_tol);
    t.masses = reference_bin_masses(law, t.domain.a, t.domain.b, cfg.nbins);
  } else {
    if (!(model.sigma() > 0.0)) throw ConfigError("stationary density needs sigma > 0");
    const FixedPointResult fp = fixed_point_density(model, default_grid(model));
    t.kind = "fixed-point";
    t.domain = cfg.a ? Domain{*cfg.a, *cfg.b} : choose_domain(fp.density, cfg.mass_tol);
    t.masses = reference_bin_masses(fp.density, t.domain.a, t.domain.b, cfg.nbins);
  }
  return t;
}

std::vector<ErrorReport> run_stationary_error(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelSpec model = cfg.model();
  const StationaryTarget target = stationary_target(cfg);
  std::vector<ErrorReport> out;
  for (std::size_t n : cfg.n_particles) {
    for (double h : cfg.h) {
      for (double T : cfg.T) {
        for (std::size_t r = 0; r < cfg.replicates; ++r) {
          const std::uint64_t seed = cfg.seed + r;
          const SchemeConfig sc = scheme_config(cfg, n, h, T, seed);
          ObservationPlan plan;
          if (cfg.series) {
            plan.on_step = [&](Scheme s, std::size_t, double t, std::span<const double> x) {
              out.push_back(make_report(cfg, target, s, n, h, t, seed, x));
            };
          }
          const auto records = simulate_coupled(cfg.schemes, sc, model, plan);
          if (!cfg.series) {
            for (const auto& rec : records) {
              out.push_back(make_report(cfg, target, rec.scheme, n, h, T, seed,
                                        rec.final_positions));
            }
          }
        }
      }
    }
  }
  return out;
}

PocResult run_poc(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.series = false;
  PocResult res;
  res.reports = run_stationary_error(c);
  std::vector<std::pair<Scheme, LogPoint>> pts;
  for (Scheme s : cfg.schemes) {
    const std::string name(to_string(s));
    for (std::size_t n : cfg.n_particles) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& r : res.reports) {
        if (r.scheme == name && r.n_particles == n) {
          sum += r.l2_error;
          ++count;
        }
      }
      pts.push_back({s, {static_cast<double>(n), sum / static_cast<double>(count)}});
    }
  }
  res.l2_slopes = fit_by_scheme(cfg.schemes, pts);
  return res;
}

WeakOrderResult run_weak_order(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelSpec model = cfg.model();
  const TestFunction f = cfg.test_function();
  const std::size_t n = cfg.n_particles.front();
  const double T = cfg.T.front();
  const std::size_t reps = cfg.replicates;
  const bool exact = cfg.weak_reference == WeakReference::Exact;

  // Per-replicate reference values.
  std::vector<double> ref(reps);
  double h_ref = 0.0;
  if (exact) {
    std::fill(ref.begin(), ref.end(),
              gaussian_expectation(linear_model_law(model, cfg.init(), T), f));
  } else {
    h_ref = *std::min_element(cfg.h.begin(), cfg.h.end()) / static_cast<double>(cfg.weak_ratio);
    for (std::size_t r = 0; r < reps; ++r) {
      // Independent noise: a seed family disjoint from the scheme runs.
      SchemeConfig sc = scheme_config(cfg, n, h_ref, T, cfg.seed + r + 0x9E3779B97F4A7C15ull);
      sc.scheme = Scheme::Euler;
      sc.unsafe_h = true;
      ref[r] = weak_functional(simulate(sc, model).final_positions, f);
    }
  }
  const std::string ref_name =
      exact ? std::string("exact") : "fine-euler(h=" + format_real(h_ref) + ")";

  WeakOrderResult res;
  std::vector<std::pair<Scheme, LogPoint>> pts;
  for (double h : cfg.h) {
    std::vector<std::vector<double>> vals(cfg.schemes.size(), std::vector<double>(reps));
    for (std::size_t r = 0; r < reps; ++r) {
      const auto records =
          simulate_coupled(cfg.schemes, scheme_config(cfg, n, h, T, cfg.seed + r), model);
      for (std::size_t s = 0; s < records.size(); ++s) {
        vals[s][r] = weak_functional(records[s].final_positions, f);
      }
    }
    for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
      double mv = 0.0, mr = 0.0, md = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        mv += vals[s][r];
        mr += ref[r];
        md += vals[s][r] - ref[r];
      }
      const auto R = static_cast<double>(reps);
      mv /= R;
      mr /= R;
      md /= R;
      double ss = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double d = vals[s][r] - ref[r] - md;
        ss += d * d;
      }
      const double se = reps > 1 ? std::sqrt(ss / (R - 1.0) / R) : 0.0;
      WeakRow row{cfg.schemes[s], n, h, T, cfg.seed, reps, f.name(), ref_name,
                  mv, mr, std::abs(mv - mr), se};
      res.rows.push_back(row);
      if (row.weak_error > 0.0) pts.push_back({cfg.schemes[s], {h, row.weak_error}});
    }
  }
  res.slopes = fit_by_scheme(cfg.schemes, pts);
  return res;
}

StrongOrderResult run_strong_order(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelSpec model = cfg.model();
  const std::size_t n = cfg.n_particles.front();
  const double T = cfg.T.front();
  std::vector<double> hs = cfg.h;
  std::sort(hs.begin(), hs.end());
  const auto ratio = static_cast<std::uint32_t>(cfg.strong_ratio);

  StrongOrderResult res;
  std::vector<std::pair<Scheme, LogPoint>> pts;
  for (double h : hs) {
    // h = h_min 2^k; every run samples the path at h_min / ratio.
    const auto k = static_cast<std::uint32_t>(std::lround(std::log2(h / hs.front())));
    const std::uint32_t level = 1u << k;

    SchemeConfig coarse = scheme_config(cfg, n, h, T, cfg.seed);
    coarse.noise_refinement = ratio * level;
    ObservationPlan plan;
    for (std::size_t m = 0; m <= coarse.steps; ++m) plan.snapshot_steps.push_back(m);
    const auto records = simulate_coupled(cfg.schemes, coarse, model, plan);

    const double h_ref = h / static_cast<double>(ratio);
    SchemeConfig fine = scheme_config(cfg, n, h_ref, T, cfg.seed);
    fine.scheme = Scheme::Euler;
    fine.noise_refinement = level;
    fine.unsafe_h = true;
    std::vector<double> worst(records.size(), 0.0);
    ObservationPlan fine_plan;
    fine_plan.on_step = [&](Scheme, std::size_t m, double, std::span<const double> y) {
      if (m % ratio != 0) return;
      const std::size_t cm = m / ratio;
      for (std::size_t s = 0; s < records.size(); ++s) {
        const auto& x = records[s].snapshots.at(cm).positions;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
        worst[s] = std::max(worst[s], std::sqrt(acc / static_cast<double>(n)));
      }
    };
    simulate(fine, model, fine_plan);
    for (std::size_t s = 0; s < records.size(); ++s) {
      res.rows.push_back({cfg.schemes[s], n, h, T, cfg.seed, h_ref, worst[s]});
      if (worst[s] > 0.0) pts.push_back({cfg.schemes[s], {h, worst[s]}});
    }
  }
  res.slopes = fit_by_scheme(cfg.schemes, pts);
  return res;
}

DecayResult run_variation_decay(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelSpec model = cfg.model();
  DecayOptions o;
  o.mc_samples = cfg.mc_samples;
  o.p = cfg.decay_p;
  o.times = cfg.decay_times;
  o.h = cfg.h.front();
  o.seed = cfg.seed;
  o.init = cfg.init();
  o.threads = std::max(cfg.threads, 1u);

  DecayResult res;
  if (cfg.n_particles.size() >= 2) {
    res.sweep = variation_decay_sweep(model, o, cfg.n_particles);
  } else {
    o.n_particles = cfg.n_particles.front();
    res.sweep.runs.push_back(variation_decay_summary(model, o));
  }
  for (std::size_t n : cfg.n_particles) {
    const FirstVariation j0(n);
    const auto nn = static_cast<Eigen::Index>(n);
    res.identity_error = std::max(
        res.identity_error, (j0.matrix() - Eigen::MatrixXd::Identity(nn, nn)).cwiseAbs().maxCoeff());
  }
  return res;
}

AssumptionReport run_assumptions_check(const ExperimentConfig& cfg) {
  return check_assumptions(cfg.model());
}

std::vector<SimulateRun> run_simulate(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelSpec model = cfg.model();
  std::vector<SimulateRun> out;
  ObservationPlan plan;
  plan.moment_trace = true;
  for (std::size_t n : cfg.n_particles) {
    for (double h : cfg.h) {
      for (double T : cfg.T) {
        for (std::size_t r = 0; r < cfg.replicates; ++r) {
          const std::uint64_t seed = cfg.seed + r;
          out.push_back(
              {n, T, seed, simulate_coupled(cfg.schemes, scheme_config(cfg, n, h, T, seed), model,
                                            plan)});
        }
      }
    }
  }
  return out;
}

void write_csv(std::ostream& os, const std::vector<ErrorReport>& reports) {
  os << "scheme,N,h,T,seed,a,b,nbins,entropy_error,l2_error\n";
  for (const auto& r : reports) {
    os << r.scheme << ',' << r.n_particles << ',' << format_real(r.h) << ','
       << format_real(r.T) << ',' << r.seed << ',' << format_real(r.a) << ','
       << format_real(r.b) << ',' << r.nbins << ',' << format_real(r.entropy_error) << ','
       << format_real(r.l2_error) << '\n';
  }
}

void write_csv(std::ostream& os, const WeakOrderResult& res) {
  os << "scheme,N,h,T,seed,replicates,f,reference,value,reference_value,weak_error,std_error\n";
  for (const auto& r : res.rows) {
    os << to_string(r.scheme) << ',' << r.n_particles << ',' << format_real(r.h) << ','
       << format_real(r.T) << ',' << r.seed << ',' << r.replicates << ',' << r.f << ','
       << r.reference << ',' << format_real(r.value) << ',' << format_real(r.reference_value)
       << ',' << format_real(r.weak_error) << ',' << format_real(r.std_error) << '\n';
  }
}

void write_csv(std::ostream& os, const StrongOrderResult& res) {
  os << "scheme,N,h,T,seed,reference_h,strong_error\n";
  for (const auto& r : res.rows) {
    os << to_string(r.scheme) << ',' << r.n_particles << ',' << format_real(r.h) << ','
       << format_real(r.T) << ',' << r.seed << ',' << format_real(r.reference_h) << ','
       << format_real(r.strong_error) << '\n';
  }
}

void write_csv(std::ostream& os, const DecayResult& res) {
  os << "N,p,t,column_sum,off_diagonal_sum\n";
  for (const auto& run : res.sweep.runs) {
    for (std::size_t k = 0; k < run.times.size(); ++k) {
      os << run.n_particles << ',' << run.p << ',' << format_real(run.times[k]) << ','
         << format_real(run.column_sum[k]) << ',' << format_real(run.off_diagonal_sum[k])
         << '\n';
    }
  }
}

void write_csv(std::ostream& os, const AssumptionReport& r) {
  os << "check,verdict,detail\n";
  for (const auto& c : r.checks) {
    os << c.name << ',' << to_string(c.verdict) << ",\"" << c.detail << "\"\n";
  }
}

void write_csv(std::ostream& os, const std::vector<SimulateRun>& runs) {
  os << "scheme,N,h,T,seed,step,t,mean,second_moment,fourth_moment\n";
  for (const auto& run : runs) {
    for (const auto& rec : run.records) {
      for (const auto& m : rec.moments) {
        os << to_string(rec.scheme) << ',' << run.n_particles << ',' << format_real(rec.h)
           << ',' << format_real(run.T) << ',' << run.seed << ',' << m.step << ','
           << format_real(m.t) << ',' << format_real(m.mean) << ',' << format_real(m.second)
           << ',' << format_real(m.fourth) << '\n';
      }
    }
  }
}

void emit_csv(const std::vector<ErrorReport>& reports, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_csv(out, reports);
}

}  // namespace mfl
