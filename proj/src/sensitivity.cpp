#include "mfl/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfl/ensemble.hpp"
#include "mfl/errors.hpp"
#include "mfl/integrators.hpp"
#include "mfl/parallel.hpp"
#include "mfl/rng.hpp"

namespace mfl {

namespace {

void check_size(std::size_t n, std::size_t cap, const char* what) {
  if (n == 0) throw std::invalid_argument(std::string(what) + ": need at least one particle");
  if (n > cap) {
    throw std::invalid_argument(std::string(what) + ": particle count " + std::to_string(n) +
                                " exceeds the dense-storage limit " + std::to_string(cap));
  }
}

/// Least-squares slope of y on x.
double ls_slope(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

/// -d log(v)/dt fitted over entries with t >= t_from and v > 0.
double decay_rate(std::span<const double> t, std::span<const double> v, double t_from) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_from && v[i] > 0.0) {
      xs.push_back(t[i]);
      ys.push_back(std::log(v[i]));
    }
  }
  if (xs.size() < 2) return 0.0;
  return -ls_slope(xs, ys);
}

void euler_advance(const ModelSpec& model, std::vector<double>& x, std::span<const double> z,
                   double h, std::vector<double>& b) {
  drift(model, x, b);
  const double amp = model.sigma() * std::sqrt(h);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += b[i] * h + amp * z[i];
}

std::size_t grid_steps(double horizon, double h) {
  if (!(h > 0.0)) throw ConfigError("time step h must be positive");
  return steps_for_horizon(horizon, h);
}

}  // namespace

Eigen::MatrixXd drift_jacobian(const ModelSpec& model, std::span<const double> x) {
  const std::size_t n = x.size();
  const auto nn = static_cast<Eigen::Index>(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd a(nn, nn);
  if (model.has_zero_interaction()) {
    a.setZero();
    for (std::size_t i = 0; i < n; ++i) a(i, i) = -hess_u(model, x[i]);
    return a;
  }
  if (model.has_quadratic_interaction()) {
    const double alpha = model.interaction_alpha();
    a.setConstant(alpha * inv_n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += -hess_u(model, x[i]) - alpha;
    return a;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double diag = -hess_u(model, x[i]);
    for (std::size_t l = 0; l < n; ++l) {
      if (l == i) continue;
      const double c = inv_n * hess_v(model, x[i] - x[l]);
      a(i, l) = c;
      diag -= c;
    }
    a(i, i) = diag;
  }
  return a;
}

FirstVariation::FirstVariation(std::size_t n) {
  check_size(n, kMaxParticles, "FirstVariation");
  const auto nn = static_cast<Eigen::Index>(n);
  j_ = Eigen::MatrixXd::Identity(nn, nn);
}

void FirstVariation::advance(const ModelSpec& model, std::span<const double> x, double h) {
  const std::size_t n = size();
  if (x.size() != n) throw std::invalid_argument("FirstVariation: position count mismatch");
  if (model.has_zero_interaction()) {
    for (std::size_t i = 0; i < n; ++i) j_.row(i) *= 1.0 - h * hess_u(model, x[i]);
    return;
  }
  if (model.has_quadratic_interaction()) {
    // A J = -diag(U'') J - alpha (J - 1 colmean(J))
    const double alpha = model.interaction_alpha();
    const Eigen::RowVectorXd shift = (h * alpha) * j_.colwise().mean();
    Eigen::VectorXd c(j_.rows());
    for (std::size_t i = 0; i < n; ++i) c(i) = 1.0 - h * (hess_u(model, x[i]) + alpha);
    j_ = c.asDiagonal() * j_;
    j_.rowwise() += shift;
    return;
  }
  scratch_.noalias() = drift_jacobian(model, x) * j_;
  j_ += h * scratch_;
}

SecondVariation::SecondVariation(std::size_t n) : n_(n) {
  check_size(n, kMaxParticles, "SecondVariation");
  data_.assign(n * n * n, 0.0);
}

double SecondVariation::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> second_order_source(const ModelSpec& model, std::span<const double> x,
                                        const Eigen::MatrixXd& jac) {
  const std::size_t n = x.size();
  if (static_cast<std::size_t>(jac.rows()) != n || static_cast<std::size_t>(jac.cols()) != n) {
    throw std::invalid_argument("second_order_source: Jacobian shape mismatch");
  }
  std::vector<double> s(n * n * n, 0.0);
  std::vector<double> u3(n);
  for (std::size_t i = 0; i < n; ++i) u3[i] = third_u(model, x[i]);

  const bool pair_terms =
      !model.has_zero_interaction() && !model.has_quadratic_interaction();
  std::vector<double> v3;
  if (pair_terms) {
    v3.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t q = 0; q < n; ++q) v3[i * n + q] = third_v(model, x[i] - x[q]);
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      double* col = s.data() + (j * n + k) * n;
      for (std::size_t i = 0; i < n; ++i) {
        double v = -u3[i] * jac(i, j) * jac(i, k);
        if (pair_terms) {
          double acc = 0.0;
          for (std::size_t q = 0; q < n; ++q) {
            acc += v3[i * n + q] * (jac(i, j) - jac(q, j)) * (jac(i, k) - jac(q, k));
          }
          v -= inv_n * acc;
        }
        col[i] = v;
      }
    }
  }
  return s;
}

void SecondVariation::advance(const ModelSpec& model, std::span<const double> x,
                              const FirstVariation& jac, double h) {
  if (x.size() != n_ || jac.size() != n_) {
    throw std::invalid_argument("SecondVariation: size mismatch");
  }
  const auto nn = static_cast<Eigen::Index>(n_);
  const std::vector<double> src = second_order_source(model, x, jac.matrix());
  Eigen::Map<Eigen::MatrixXd> k(data_.data(), nn, nn * nn);
  Eigen::Map<const Eigen::MatrixXd> s(src.data(), nn, nn * nn);
  const Eigen::MatrixXd ak = drift_jacobian(model, x) * k;
  k += h * (ak + s);
}

FirstVariation first_variation_evolve(const ModelSpec& model,
                                      std::span<const std::vector<double>> path, double h) {
  if (path.empty()) throw std::invalid_argument("first_variation_evolve: empty path");
  FirstVariation jac(path.front().size());
  for (std::size_t m = 0; m + 1 < path.size(); ++m) jac.advance(model, path[m], h);
  return jac;
}

SecondVariation second_variation_evolve(const ModelSpec& model,
                                        std::span<const std::vector<double>> path, double h) {
  if (path.empty()) throw std::invalid_argument("second_variation_evolve: empty path");
  const std::size_t n = path.front().size();
  SecondVariation k(n);
  FirstVariation jac(n);
  for (std::size_t m = 0; m + 1 < path.size(); ++m) {
    k.advance(model, path[m], jac, h);
    jac.advance(model, path[m], h);
  }
  return k;
}

void replica_normals(std::uint64_t seed, std::uint32_t replica, std::size_t n, std::size_t steps,
                     std::span<double> out) {
  if (out.size() != n * steps) throw std::invalid_argument("replica_normals: buffer size");
  fill_standard_normals(seed, Stream::ReplicaIncrement, 0, replica, out);
}

std::vector<double> replica_initial_positions(std::uint64_t seed, std::uint32_t replica,
                                              std::size_t n, const GaussianLaw& law) {
  std::vector<double> x(n);
  fill_standard_normals(seed, Stream::ReplicaInitial, 0, replica, x);
  const double sd = law.stddev();
  for (double& v : x) v = law.mean + sd * v;
  return x;
}

DecaySummary variation_decay_summary(const ModelSpec& model, const DecayOptions& opts) {
  if (opts.mc_samples < 100) throw ConfigError("variation decay needs mc_samples >= 100");
  if (opts.p <= 0 || opts.p % 2 != 0) throw ConfigError("variation decay needs an even p > 0");
  if (opts.times.empty()) throw ConfigError("variation decay needs a time grid");
  if (opts.mc_samples > 0xFFFFFFFFull) throw ConfigError("too many Monte Carlo samples");
  check_size(opts.n_particles, FirstVariation::kMaxParticles, "variation_decay_summary");

  const std::size_t n = opts.n_particles;
  std::vector<std::size_t> record_steps;
  for (double t : opts.times) {
    if (!(t >= 0.0)) throw ConfigError("variation decay times must be non-negative");
    record_steps.push_back(grid_steps(t, opts.h));
  }
  if (!std::is_sorted(record_steps.begin(), record_steps.end())) {
    throw ConfigError("variation decay times must be ascending");
  }
  const std::size_t steps = record_steps.back();
  const std::size_t nt = record_steps.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  // Per-replica values, reduced in replica order afterwards.
  std::vector<double> col(opts.mc_samples * nt), off(opts.mc_samples * nt);

  parallel_for(
      opts.mc_samples, opts.threads,
      [&](std::size_t begin, std::size_t end) {
        std::vector<double> z(n * steps), b(n);
        for (std::size_t r = begin; r < end; ++r) {
          const auto rep = static_cast<std::uint32_t>(r);
          std::vector<double> x = replica_initial_positions(opts.seed, rep, n, opts.init);
          replica_normals(opts.seed, rep, n, steps, z);
          FirstVariation jac(n);
          std::size_t next = 0;
          auto record = [&](std::size_t m) {
            while (next < nt && record_steps[next] == m) {
              double c = 0.0, o = 0.0;
              const Eigen::MatrixXd& jm = jac.matrix();
              for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < n; ++i) {
                  const double v = std::pow(std::abs(jm(i, j)), opts.p);
                  c += v;
                  if (i != j) o += v;
                }
              }
              col[r * nt + next] = c * inv_n;
              off[r * nt + next] = o * inv_n;
              ++next;
            }
          };
          record(0);
          for (std::size_t m = 0; m < steps; ++m) {
            jac.advance(model, x, opts.h);
            euler_advance(model, x, std::span<const double>(z).subspan(m * n, n), opts.h, b);
            record(m + 1);
          }
        }
      },
      1);

  DecaySummary out;
  out.n_particles = n;
  out.p = opts.p;
  out.times = opts.times;
  out.column_sum.assign(nt, 0.0);
  out.off_diagonal_sum.assign(nt, 0.0);
  const auto mc = static_cast<double>(opts.mc_samples);
  for (std::size_t k = 0; k < nt; ++k) {
    double s = 0.0, s2 = 0.0, so = 0.0;
    for (std::size_t r = 0; r < opts.mc_samples; ++r) {
      const double v = col[r * nt + k];
      s += v;
      s2 += v * v;
      so += off[r * nt + k];
    }
    const double mean = s / mc;
    const double var = std::max(0.0, (s2 - mc * mean * mean) / (mc - 1.0));
    out.column_sum[k] = mean;
    out.off_diagonal_sum[k] = so / mc;
    out.max_std_error = std::max(out.max_std_error, std::sqrt(var / mc));
  }
  const double t_end = opts.times.back();
  out.column_rate = decay_rate(out.times, out.column_sum, opts.times.front());
  out.column_tail_rate = decay_rate(out.times, out.column_sum, 0.5 * t_end);
  out.off_diagonal_rate = decay_rate(out.times, out.off_diagonal_sum, 0.5 * t_end);
  return out;
}

DecaySweep variation_decay_sweep(const ModelSpec& model, const DecayOptions& opts,
                                 std::span<const std::size_t> particle_counts) {
  if (particle_counts.size() < 2) throw ConfigError("an N-sweep needs at least two values");
  DecaySweep sweep;
  for (std::size_t n : particle_counts) {
    DecayOptions o = opts;
    o.n_particles = n;
    sweep.runs.push_back(variation_decay_summary(model, o));
  }
  const std::size_t nt = opts.times.size();
  for (std::size_t k = 0; k < nt; ++k) {
    if (!(opts.times[k] > 0.0)) continue;
    std::vector<LogPoint> pts;
    for (const auto& run : sweep.runs) {
      pts.push_back({static_cast<double>(run.n_particles), run.off_diagonal_sum[k]});
    }
    sweep.off_diagonal_power.push_back(regression_slope(pts).slope);
  }
  if (sweep.off_diagonal_power.empty()) {
    throw ConfigError("an N-sweep needs at least one positive time");
  }
  sweep.final_off_diagonal_power = sweep.off_diagonal_power.back();
  return sweep;
}

GradientEstimate u_gradient_mc(const ModelSpec& model, const TestFunction& f, double t,
                               std::span<const double> x, double T,
                               const GradientOptions& opts) {
  constexpr std::size_t kMaxGradientParticles = 64;
  check_size(x.size(), kMaxGradientParticles, "u_gradient_mc");
  if (!(T >= t)) throw ConfigError("u_gradient_mc needs T >= t");
  if (opts.mc_samples < 2) throw ConfigError("u_gradient_mc needs at least two replicas");
  if (opts.mc_samples > 0xFFFFFFFFull) throw ConfigError("too many Monte Carlo samples");
  const std::size_t n = x.size();
  const std::size_t steps = grid_steps(T - t, opts.h);
  const double inv_n = 1.0 / static_cast<double>(n);

  if (steps == 0) {
    // No noise enters: the estimator is the deterministic terminal gradient.
    GradientEstimate est;
    est.std_error.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      est.mean.push_back(f.derivative(x[j]) / static_cast<double>(n));
      est.u_mean += f.value(x[j]);
    }
    est.u_mean /= static_cast<double>(n);
    return est;
  }

  // Row r: n gradient entries followed by u.
  const std::size_t stride = n + 1;
  std::vector<double> vals(opts.mc_samples * stride);
  parallel_for(
      opts.mc_samples, opts.threads,
      [&](std::size_t begin, std::size_t end) {
        std::vector<double> z(n * steps), b(n), xs(n);
        for (std::size_t r = begin; r < end; ++r) {
          xs.assign(x.begin(), x.end());
          replica_normals(opts.seed, static_cast<std::uint32_t>(r), n, steps, z);
          FirstVariation jac(n);
          for (std::size_t m = 0; m < steps; ++m) {
            jac.advance(model, xs, opts.h);
            euler_advance(model, xs, std::span<const double>(z).subspan(m * n, n), opts.h, b);
          }
          double* row = vals.data() + r * stride;
          double u = 0.0;
          for (std::size_t i = 0; i < n; ++i) u += f.value(xs[i]);
          row[n] = u * inv_n;
          for (std::size_t j = 0; j < n; ++j) {
            double g = 0.0;
            for (std::size_t i = 0; i < n; ++i) g += f.derivative(xs[i]) * jac(i, j);
            row[j] = g * inv_n;
          }
        }
      },
      64);

  GradientEstimate est;
  est.mean.assign(n, 0.0);
  est.std_error.assign(n, 0.0);
  const auto mc = static_cast<double>(opts.mc_samples);
  for (std::size_t c = 0; c < stride; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < opts.mc_samples; ++r) s += vals[r * stride + c];
    const double mean = s / mc;
    double ss = 0.0;
    for (std::size_t r = 0; r < opts.mc_samples; ++r) {
      const double d = vals[r * stride + c] - mean;
      ss += d * d;
    }
    const double se = std::sqrt(ss / (mc - 1.0) / mc);
    if (c < n) {
      est.mean[c] = mean;
      est.std_error[c] = se;
    } else {
      est.u_mean = mean;
      est.u_std_error = se;
    }
  }
  return est;
}

}  // namespace mfl
