#include <string>

#include "doctest.h"
#include "mfl/config.hpp"
#include "mfl/errors.hpp"

using namespace mfl;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("a full file parses") {
  const auto cfg = parse_config(
      "# linear model, two schemes\n"
      "experiment = poc\n"
      "\n"
      "model.alpha = 0.3   # weaker coupling\n"
      "model.sigma = 1.5\n"
      "sim.N = 1000, 10000\n"
      "sim.h = 0.04\n"
      "sim.T = 9\n"
      "sim.scheme = euler, nm\n"
      "sim.seed = 17\n"
      "hist.a = -3\n"
      "hist.b = 3\n"
      "hist.nbins = 120\n"
      "sim.deterministic = false\n");
  CHECK(cfg.experiment == Experiment::Poc);
  CHECK(cfg.alpha == 0.3);
  CHECK(cfg.sigma == 1.5);
  CHECK(cfg.n_particles == std::vector<std::size_t>{1000, 10000});
  CHECK(cfg.schemes == std::vector<Scheme>{Scheme::Euler, Scheme::NonMarkovian});
  CHECK(cfg.seed == 17);
  CHECK(cfg.a == -3.0);
  CHECK(cfg.b == 3.0);
  CHECK(cfg.nbins == 120);
  CHECK_FALSE(cfg.deterministic);
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("defaults") {
  const auto cfg = parse_config("experiment = simulate");
  CHECK(cfg.alpha == 0.5);
  CHECK(cfg.sigma == 0.8);
  CHECK(cfg.nbins == 72);
  CHECK(cfg.deterministic);
  CHECK_FALSE(cfg.a.has_value());
  CHECK(cfg.model().interaction_alpha() == 0.5);
}

TEST_CASE("errors name the offending line") {
  const std::string unknown = error_of("experiment = simulate\nsim.hh = 0.1\n");
  CHECK(contains(unknown, "line 2"));
  CHECK(contains(unknown, "unknown key 'sim.hh'"));

  const std::string dup = error_of("experiment = simulate\n\nsim.h = 0.1\nsim.h = 0.2\n");
  CHECK(contains(dup, "line 4"));
  CHECK(contains(dup, "duplicate key 'sim.h'"));

  const std::string empty = error_of("experiment = simulate\nsim.T =   # nothing\n");
  CHECK(contains(empty, "line 2"));
  CHECK(contains(empty, "empty value"));

  const std::string bad = error_of("experiment = simulate\nmodel.sigma = 0.8x\n");
  CHECK(contains(bad, "line 2"));
  CHECK(contains(bad, "bad value for 'model.sigma'"));

  CHECK(contains(error_of("experiment = simulate\nsim.N = 10, -5\n"), "bad value"));
  CHECK(contains(error_of("experiment = simulate\nsim.scheme = rk4\n"), "unknown scheme"));
  CHECK(contains(error_of("experiment = simulate\nsim.unsafe_h = maybe\n"), "not a boolean"));
  CHECK(contains(error_of("experiment = simulate\nsim.h = nan\n"), "finite"));
  CHECK(contains(error_of("experiment = dance\n"), "unknown experiment"));
  CHECK(contains(error_of("experiment = simulate\njust some words\n"), "line 2"));
  CHECK(contains(error_of("sim.h = 0.1\n"), "missing required key 'experiment'"));
}

TEST_CASE("emitted text parses back to the same config") {
  auto cfg = parse_config(
      "experiment = weak-order\n"
      "model.u = polynomial\n"
      "model.u_coeffs = 0, 0.1, 0.5, 0, 0.01\n"
      "model.v = logcosh\n"
      "model.beta = 0.7\n"
      "sim.h = 0.1, 0.05, 0.025\n"
      "sim.T = 1, 3\n"
      "init.mean = 1\n"
      "weak.f = square\n"
      "weak.ratio = 4\n"
      "decay.times = 0, 0.5, 1\n"
      "output = out.csv\n");
  const std::string text = emit_config(cfg);
  const auto back = parse_config(text);
  CHECK(emit_config(back) == text);
  CHECK(back.u_coeffs == cfg.u_coeffs);
  CHECK(back.h == cfg.h);
  CHECK(back.beta == 0.7);
  CHECK(back.output == "out.csv");
  CHECK(back.weak_ratio == 4);
  CHECK(back.decay_times == cfg.decay_times);

  // Awkward doubles survive the trip bit for bit.
  cfg.sigma = 0.1 + 0.2;
  cfg.a = -1.8;
  cfg.b = 1.8;
  const auto again = parse_config(emit_config(cfg));
  CHECK(again.sigma == cfg.sigma);
  CHECK(again.a == -1.8);
  CHECK(!contains(emit_config(parse_config("experiment = simulate")), "hist.a"));
}

TEST_CASE("cross-field validation") {
  auto base = [] { return parse_config("experiment = simulate\nsim.h = 0.16\nsim.T = 8.64\n"); };
  CHECK_NOTHROW(validate(base()));

  auto c = base();
  c.T = {9.0};  // 9 / 0.16 is not an integer
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = base();
  c.h = {1.2};  // above min(1 / (2 lambda), 1)
  c.T = {12.0};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.unsafe_h = true;
  CHECK_NOTHROW(validate(c));

  c = base();
  c.experiment = Experiment::Poc;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.n_particles = {100, 1000};
  CHECK_NOTHROW(validate(c));

  c = base();
  c.experiment = Experiment::WeakOrder;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.h = {0.16, 0.08};
  CHECK_NOTHROW(validate(c));
  c.weak_reference = WeakReference::Exact;
  CHECK_NOTHROW(validate(c));
  c.v_kind = "logcosh";
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = base();
  c.experiment = Experiment::StrongOrder;
  c.h = {0.16, 0.08, 0.04};
  CHECK_NOTHROW(validate(c));
  c.h = {0.16, 0.12};
  c.T = {0.48};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.h = {0.16, 0.08};
  c.strong_ratio = 48;
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = base();
  c.experiment = Experiment::VariationDecay;
  c.mc_samples = 50;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.mc_samples = 100;
  c.decay_p = 3;
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = base();
  c.a = -1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.b = -2.0;
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = base();
  c.sigma = -0.1;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = base();
  c.u_kind = "polynomial";
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("experiment names") {
  for (auto e : {Experiment::Simulate, Experiment::StationaryError, Experiment::Poc,
                 Experiment::WeakOrder, Experiment::StrongOrder, Experiment::VariationDecay,
                 Experiment::AssumptionsCheck}) {
    CHECK(parse_experiment(to_string(e)) == e);
  }
}

}
