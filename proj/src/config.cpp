#include "mfl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mfl/errors.hpp"

namespace mfl {

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Simulate: return "simulate";
    case Experiment::StationaryError: return "stationary-error";
    case Experiment::Poc: return "poc";
    case Experiment::WeakOrder: return "weak-order";
    case Experiment::StrongOrder: return "strong-order";
    case Experiment::VariationDecay: return "variation-decay";
    case Experiment::AssumptionsCheck: return "assumptions-check";
  }
  return "?";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::Simulate, Experiment::StationaryError, Experiment::Poc,
                 Experiment::WeakOrder, Experiment::StrongOrder, Experiment::VariationDecay,
                 Experiment::AssumptionsCheck}) {
    if (to_string(e) == name) return e;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

ModelSpec ExperimentConfig::model() const {
  ConfiningPotential u;
  if (u_kind == "quadratic") {
    u = QuadraticPotential{u_curvature};
  } else if (u_kind == "polynomial") {
    if (u_coeffs.empty()) throw ConfigError("model.u = polynomial needs model.u_coeffs");
    u = PolynomialPotential{u_coeffs};
  } else {
    throw ConfigError("unknown confining potential '" + u_kind + "'");
  }
  InteractionPotential v;
  if (v_kind == "zero") {
    v = ZeroInteraction{};
  } else if (v_kind == "quadratic") {
    v = QuadraticInteraction{alpha};
  } else if (v_kind == "logcosh") {
    v = LogCoshInteraction{beta};
  } else {
    throw ConfigError("unknown interaction potential '" + v_kind + "'");
  }
  try {
    return ModelSpec(u, v, sigma);
  } catch (const ModelError& e) {
    throw ConfigError(e.what());
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("'" + std::string(s) + "' is not a finite number");
  }
  return v;
}

std::uint64_t to_uint(std::string_view s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError("'" + std::string(s) + "' is not a non-negative integer");
  }
  return v;
}

bool to_bool(std::string_view s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError("'" + std::string(s) + "' is not a boolean");
}

template <class T, class F>
std::vector<T> to_list(std::string_view s, F&& conv) {
  std::vector<T> out;
  for (auto item : split_list(s)) {
    if (item.empty()) throw ConfigError("empty list element");
    out.push_back(static_cast<T>(conv(item)));
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& f) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += f(xs[i]);
  }
  return s;
}

std::string fmt_uint(std::uint64_t v) { return std::to_string(v); }

struct Key {
  std::string name;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  /// Empty optional: omitted by emit_config.
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

std::string weak_reference_name(WeakReference r) {
  return r == WeakReference::Exact ? "exact" : "fine-euler";
}

std::string stationary_reference_name(StationaryReference r) {
  switch (r) {
    case StationaryReference::Auto: return "auto";
    case StationaryReference::Exact: return "exact";
    case StationaryReference::FixedPoint: return "fixed-point";
  }
  return "?";
}

const std::vector<Key>& keys() {
  using C = ExperimentConfig;
  using S = std::string_view;
  using O = std::optional<std::string>;
  static const std::vector<Key> table = {
      {"experiment", [](C& c, S v) { c.experiment = parse_experiment(v); },
       [](const C& c) -> O { return std::string(to_string(c.experiment)); }},

      {"model.u", [](C& c, S v) { c.u_kind = v; }, [](const C& c) -> O { return c.u_kind; }},
      {"model.u_curvature", [](C& c, S v) { c.u_curvature = to_double(v); },
       [](const C& c) -> O { return fmt(c.u_curvature); }},
      {"model.u_coeffs", [](C& c, S v) { c.u_coeffs = to_list<double>(v, to_double); },
       [](const C& c) -> O {
         if (c.u_coeffs.empty()) return std::nullopt;
         return join(c.u_coeffs, fmt);
       }},
      {"model.v", [](C& c, S v) { c.v_kind = v; }, [](const C& c) -> O { return c.v_kind; }},
      {"model.alpha", [](C& c, S v) { c.alpha = to_double(v); },
       [](const C& c) -> O { return fmt(c.alpha); }},
      {"model.beta", [](C& c, S v) { c.beta = to_double(v); },
       [](const C& c) -> O { return fmt(c.beta); }},
      {"model.sigma", [](C& c, S v) { c.sigma = to_double(v); },
       [](const C& c) -> O { return fmt(c.sigma); }},

      {"sim.N", [](C& c, S v) { c.n_particles = to_list<std::size_t>(v, to_uint); },
       [](const C& c) -> O { return join(c.n_particles, fmt_uint); }},
      {"sim.h", [](C& c, S v) { c.h = to_list<double>(v, to_double); },
       [](const C& c) -> O { return join(c.h, fmt); }},
      {"sim.T", [](C& c, S v) { c.T = to_list<double>(v, to_double); },
       [](const C& c) -> O { return join(c.T, fmt); }},
      {"sim.scheme", [](C& c, S v) { c.schemes = to_list<Scheme>(v, parse_scheme); },
       [](const C& c) -> O {
         return join(c.schemes, [](Scheme s) { return std::string(to_string(s)); });
       }},
      {"sim.seed", [](C& c, S v) { c.seed = to_uint(v); },
       [](const C& c) -> O { return fmt_uint(c.seed); }},
      {"sim.replicates", [](C& c, S v) { c.replicates = to_uint(v); },
       [](const C& c) -> O { return fmt_uint(c.replicates); }},
      {"sim.threads", [](C& c, S v) { c.threads = static_cast<unsigned>(to_uint(v)); },
       [](const C& c) -> O { return fmt_uint(c.threads); }},
      {"sim.deterministic", [](C& c, S v) { c.deterministic = to_bool(v); },
       [](const C& c) -> O { return std::string(c.deterministic ? "true" : "false"); }},
      {"sim.unsafe_h", [](C& c, S v) { c.unsafe_h = to_bool(v); },
       [](const C& c) -> O { return std::string(c.unsafe_h ? "true" : "false"); }},

      {"init.mean", [](C& c, S v) { c.init_mean = to_double(v); },
       [](const C& c) -> O { return fmt(c.init_mean); }},
      {"init.std", [](C& c, S v) { c.init_std = to_double(v); },
       [](const C& c) -> O { return fmt(c.init_std); }},

      {"hist.a", [](C& c, S v) { c.a = to_double(v); },
       [](const C& c) -> O { return c.a ? O(fmt(*c.a)) : std::nullopt; }},
      {"hist.b", [](C& c, S v) { c.b = to_double(v); },
       [](const C& c) -> O { return c.b ? O(fmt(*c.b)) : std::nullopt; }},
      {"hist.nbins", [](C& c, S v) { c.nbins = to_uint(v); },
       [](const C& c) -> O { return fmt_uint(c.nbins); }},
      {"hist.mass_tol", [](C& c, S v) { c.mass_tol = to_double(v); },
       [](const C& c) -> O { return fmt(c.mass_tol); }},

      {"stationary.reference",
       [](C& c, S v) {
         if (v == "auto") c.stationary_reference = StationaryReference::Auto;
         else if (v == "exact") c.stationary_reference = StationaryReference::Exact;
         else if (v == "fixed-point") c.stationary_reference = StationaryReference::FixedPoint;
         else throw ConfigError("expected auto, exact or fixed-point");
       },
       [](const C& c) -> O { return stationary_reference_name(c.stationary_reference); }},
      {"stationary.series", [](C& c, S v) { c.series = to_bool(v); },
       [](const C& c) -> O { return std::string(c.series ? "true" : "false"); }},

      {"weak.f",
       [](C& c, S v) {
         parse_test_function(std::string(v));
         c.weak_f = v;
       },
       [](const C& c) -> O { return c.weak_f; }},
      {"weak.reference",
       [](C& c, S v) {
         if (v == "fine-euler") c.weak_reference = WeakReference::FineEuler;
         else if (v == "exact") c.weak_reference = WeakReference::Exact;
         else throw ConfigError("expected fine-euler or exact");
       },
       [](const C& c) -> O { return weak_reference_name(c.weak_reference); }},
      {"weak.ratio", [](C& c, S v) { c.weak_ratio = to_uint(v); },
       [](const C& c) -> O { return fmt_uint(c.weak_ratio); }},

      {"strong.ratio", [](C& c, S v) { c.strong_ratio = to_uint(v); },
       [](const C& c) -> O { return fmt_uint(c.strong_ratio); }},

      {"decay.p", [](C& c, S v) { c.decay_p = static_cast<int>(to_uint(v)); },
       [](const C& c) -> O { return fmt_uint(static_cast<std::uint64_t>(c.decay_p)); }},
      {"decay.times", [](C& c, S v) { c.decay_times = to_list<double>(v, to_double); },
       [](const C& c) -> O { return join(c.decay_times, fmt); }},
      {"decay.mc_samples", [](C& c, S v) { c.mc_samples = to_uint(v); },
       [](const C& c) -> O { return fmt_uint(c.mc_samples); }},

      {"output", [](C& c, S v) { c.output = v; },
       [](const C& c) -> O { return c.output.empty() ? std::nullopt : O(c.output); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
    pos = nl == text.npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto hash = line.find('#');
    if (hash != line.npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = "line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == line.npos) {
      throw ConfigError(where + ": expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key before '='");

    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Key& k) { return k.name == key; });
    if (it == table.end()) {
      throw ConfigError(where + ": unknown key '" + std::string(key) + "'");
    }
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
    }
    if (value.empty()) {
      throw ConfigError(where + ": key '" + std::string(key) + "' has an empty value");
    }
    try {
      it->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": bad value for '" + std::string(key) + "': " + e.what());
    }
  }
  if (!seen.contains("experiment")) throw ConfigError("missing required key 'experiment'");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) {
    if (auto v = k.get(cfg)) out += k.name + " = " + *v + "\n";
  }
  return out;
}

void validate(const ExperimentConfig& cfg) {
  const ModelSpec model = cfg.model();
  if (cfg.n_particles.empty() || cfg.h.empty() || cfg.T.empty() || cfg.schemes.empty()) {
    throw ConfigError("sim.N, sim.h, sim.T and sim.scheme need at least one entry");
  }
  for (std::size_t n : cfg.n_particles) {
    if (n == 0) throw ConfigError("sim.N entries must be positive");
  }
  for (double h : cfg.h) {
    if (!(h > 0.0)) throw ConfigError("sim.h entries must be positive");
  }
  for (double T : cfg.T) {
    for (double h : cfg.h) steps_for_horizon(T, h);
  }
  if (cfg.replicates == 0) throw ConfigError("sim.replicates must be positive");
  if (!(cfg.init_std >= 0.0)) throw ConfigError("init.std must be non-negative");
  if (cfg.nbins < 2) throw ConfigError("hist.nbins must be at least 2");
  if (cfg.a.has_value() != cfg.b.has_value()) {
    throw ConfigError("hist.a and hist.b must be given together");
  }
  if (cfg.a && !(*cfg.a < *cfg.b)) throw ConfigError("hist.a must be below hist.b");
  if (!(cfg.mass_tol > 0.0 && cfg.mass_tol < 1.0)) {
    throw ConfigError("hist.mass_tol must lie in (0, 1)");
  }
  if (!cfg.unsafe_h && cfg.experiment != Experiment::AssumptionsCheck &&
      cfg.experiment != Experiment::VariationDecay) {
    const double bound = max_stable_step(model);
    for (double h : cfg.h) {
      if (!(h < bound)) {
        std::ostringstream os;
        os << "sim.h=" << h << " violates h < min(1/(2 lambda), 1) = " << bound
           << " (use --unsafe-h to override)";
        throw ConfigError(os.str());
      }
    }
  }
  switch (cfg.experiment) {
    case Experiment::Poc:
      if (cfg.n_particles.size() < 2) throw ConfigError("poc needs at least two sim.N values");
      break;
    case Experiment::WeakOrder:
    case Experiment::StrongOrder:
      if (cfg.h.size() < 2) throw ConfigError("order studies need at least two sim.h values");
      break;
    case Experiment::VariationDecay:
      if (cfg.mc_samples < 100) throw ConfigError("decay.mc_samples must be at least 100");
      if (cfg.decay_p <= 0 || cfg.decay_p % 2 != 0) {
        throw ConfigError("decay.p must be a positive even integer");
      }
      break;
    default:
      break;
  }
  if (cfg.experiment == Experiment::WeakOrder && cfg.weak_reference == WeakReference::Exact) {
    if (cfg.u_kind != "quadratic" || cfg.u_curvature != 1.0 ||
        (cfg.v_kind != "quadratic" && cfg.v_kind != "zero")) {
      throw ConfigError("weak.reference = exact needs the linear model");
    }
  }
  if (cfg.experiment == Experiment::StrongOrder) {
    if (cfg.strong_ratio == 0 || (cfg.strong_ratio & (cfg.strong_ratio - 1)) != 0) {
      throw ConfigError("strong.ratio must be a power of two");
    }
    std::vector<double> hs = cfg.h;
    std::sort(hs.begin(), hs.end());
    for (double h : hs) {
      const double r = std::log2(h / hs.front());
      if (std::abs(r - std::round(r)) > 1e-9) {
        throw ConfigError("strong-order needs a dyadic sim.h list");
      }
    }
  }
  if (cfg.experiment == Experiment::WeakOrder &&
      cfg.weak_reference == WeakReference::FineEuler && cfg.weak_ratio == 0) {
    throw ConfigError("weak.ratio must be positive");
  }
}

}  // namespace mfl
