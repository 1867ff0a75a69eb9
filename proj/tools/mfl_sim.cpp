// mfl-sim: command-line driver for the particle-system experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mfl/config.hpp"
#include "mfl/errors.hpp"
#include "mfl/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void print_fits(std::ostream& os, const char* what, const std::vector<mfl::SlopeFit>& fits) {
  for (const auto& f : fits) {
    os << what << ' ' << mfl::to_string(f.scheme) << ": slope " << mfl::format_real(f.fit.slope)
       << " (r2 " << mfl::format_real(f.fit.r2) << ")\n";
  }
}

int run(mfl::ExperimentConfig cfg, const std::string& out_path) {
  std::ostringstream csv;
  std::ostringstream summary;
  switch (cfg.experiment) {
    case mfl::Experiment::Simulate:
      mfl::write_csv(csv, mfl::run_simulate(cfg));
      break;
    case mfl::Experiment::StationaryError:
      mfl::write_csv(csv, mfl::run_stationary_error(cfg));
      break;
    case mfl::Experiment::Poc: {
      const auto r = mfl::run_poc(cfg);
      mfl::write_csv(csv, r.reports);
      print_fits(summary, "L2 vs N", r.l2_slopes);
      break;
    }
    case mfl::Experiment::WeakOrder: {
      const auto r = mfl::run_weak_order(cfg);
      mfl::write_csv(csv, r);
      print_fits(summary, "weak error vs h", r.slopes);
      break;
    }
    case mfl::Experiment::StrongOrder: {
      const auto r = mfl::run_strong_order(cfg);
      mfl::write_csv(csv, r);
      print_fits(summary, "strong error vs h", r.slopes);
      break;
    }
    case mfl::Experiment::VariationDecay: {
      const auto r = mfl::run_variation_decay(cfg);
      mfl::write_csv(csv, r);
      for (const auto& run : r.sweep.runs) {
        summary << "N=" << run.n_particles << ": column rate "
                << mfl::format_real(run.column_rate) << ", tail rate "
                << mfl::format_real(run.column_tail_rate) << ", off-diagonal rate "
                << mfl::format_real(run.off_diagonal_rate) << '\n';
      }
      if (r.sweep.runs.size() >= 2) {
        summary << "off-diagonal power of N at final time: "
                << mfl::format_real(r.sweep.final_off_diagonal_power) << '\n';
      }
      summary << "max |J(t) - I|: " << mfl::format_real(r.identity_error) << '\n';
      break;
    }
    case mfl::Experiment::AssumptionsCheck: {
      const auto r = mfl::run_assumptions_check(cfg);
      mfl::write_csv(csv, r);
      summary << "lambda " << mfl::format_real(r.lambda) << ", k_v " << mfl::format_real(r.k_v)
              << (r.has_failure() ? ": model rejected\n" : ": model accepted\n");
      break;
    }
  }
  if (out_path.empty()) {
    std::cout << csv.str();
    std::cerr << summary.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw mfl::ConfigError("cannot write '" + out_path + "'");
    out << csv.str();
    std::cout << summary.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field Langevin particle simulations and convergence studies"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  bool deterministic = false;
  bool unsafe_h = false;

  const std::pair<const char*, mfl::Experiment> commands[] = {
      {"simulate", mfl::Experiment::Simulate},
      {"stationary-error", mfl::Experiment::StationaryError},
      {"poc", mfl::Experiment::Poc},
      {"weak-order", mfl::Experiment::WeakOrder},
      {"strong-order", mfl::Experiment::StrongOrder},
      {"variation-decay", mfl::Experiment::VariationDecay},
      {"assumptions-check", mfl::Experiment::AssumptionsCheck},
  };
  for (const auto& [name, kind] : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value experiment file")->required();
    sub->add_option("--out", out_path, "CSV destination (default: stdout)");
    sub->add_flag("--deterministic", deterministic, "fixed-order reductions");
    sub->add_flag("--unsafe-h", unsafe_h, "skip the step-size stability check");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    mfl::ExperimentConfig cfg = mfl::load_config(config_path);
    for (const auto& [name, kind] : commands) {
      if (app.got_subcommand(name) && cfg.experiment != kind) {
        throw mfl::ConfigError("config declares experiment '" +
                               std::string(mfl::to_string(cfg.experiment)) +
                               "' but the subcommand is '" + name + "'");
      }
    }
    if (deterministic) cfg.deterministic = true;
    if (unsafe_h) cfg.unsafe_h = true;
    if (out_path.empty()) out_path = cfg.output;
    return run(cfg, out_path);
  } catch (const mfl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mfl::ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mfl::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  }
}
