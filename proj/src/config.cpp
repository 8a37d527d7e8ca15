#include "lexc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "lexc/errors.hpp"
#include "lexc/excursion.hpp"

namespace lexc {

namespace pt = boost::property_tree;

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::closed_forms, "closed_forms"},
    {ExperimentKind::brownian_baseline, "brownian_baseline"},
    {ExperimentKind::arcsine, "arcsine"},
    {ExperimentKind::meander, "meander"},
    {ExperimentKind::height_tail, "height_tail"},
    {ExperimentKind::equivalence, "equivalence"},
    {ExperimentKind::big_jump, "big_jump"},
    {ExperimentKind::drift_profile, "drift_profile"},
    {ExperimentKind::conditioned_start, "conditioned_start"},
    {ExperimentKind::scalefn, "scalefn"},
};

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
  }
  if (used != s.size()) throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s.empty() || s.front() == '-') throw ConfigError(fmt::format("{}: '{}' is not an unsigned integer", key, text));
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: '{}' is not an unsigned integer", key, text));
  }
  if (used != s.size()) throw ConfigError(fmt::format("{}: '{}' is not an unsigned integer", key, text));
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, text));
}

std::string get(const pt::ptree& section, const std::string& key, const std::string& fallback) {
  const auto v = section.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
  return v ? trim(*v) : fallback;
}

bool has(const pt::ptree& section, const std::string& key) {
  return section.get_child_optional(pt::ptree::path_type(key, '\0')).has_value();
}

void reject_unknown(const pt::ptree& section, const std::string& name,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, _] : section) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError(fmt::format("[{}]: unknown key '{}'", name, key));
    }
  }
}

ProcessSpec parse_model(const pt::ptree& m) {
  const std::string type = get(m, "type", "levy");
  if (type == "stable") {
    reject_unknown(m, "model", {"type", "alpha", "rho", "spectrally_positive"});
    const double alpha = to_double("model.alpha", get(m, "alpha", "2"));
    const bool sp = to_bool("model.spectrally_positive", get(m, "spectrally_positive", "false"));
    if (sp) return StableParams::spectrally_positive_with_alpha(alpha);
    return StableParams(alpha, to_double("model.rho", get(m, "rho", "0.5")), false);
  }
  if (type != "levy") throw ConfigError("model.type must be 'levy' or 'stable'");
  reject_unknown(m, "model",
                 {"type", "beta", "sigma", "jumps", "jump_rate", "jump_scale", "jump_theta",
                  "jump_mean", "jump_side", "positive_fraction", "jump_alpha", "jump_skew"});
  const double beta = to_double("model.beta", get(m, "beta", "0"));
  const double sigma = to_double("model.sigma", get(m, "sigma", "0"));
  const JumpKind kind = parse_jump_kind(get(m, "jumps", "none"));
  const JumpSide side = parse_jump_side(get(m, "jump_side", "positive_only"));
  const double pf = to_double("model.positive_fraction", get(m, "positive_fraction", "0.5"));
  JumpLaw law;
  switch (kind) {
    case JumpKind::none:
      law = JumpLaw::none();
      break;
    case JumpKind::compound_pareto: {
      const double theta = to_double("model.jump_theta", get(m, "jump_theta", "nan"));
      if (!(theta > 1.0)) throw ConfigError("model.jump_theta must be > 1 (finite mean)");
      law = JumpLaw::pareto(to_double("model.jump_rate", get(m, "jump_rate", "nan")),
                            to_double("model.jump_scale", get(m, "jump_scale", "nan")), theta, side,
                            pf);
      break;
    }
    case JumpKind::compound_exponential:
      law = JumpLaw::exponential(to_double("model.jump_rate", get(m, "jump_rate", "nan")),
                                 to_double("model.jump_mean", get(m, "jump_mean", "nan")), side,
                                 pf);
      break;
    case JumpKind::stable_jumps:
      law = JumpLaw::stable(to_double("model.jump_alpha", get(m, "jump_alpha", "nan")),
                            to_double("model.jump_skew", get(m, "jump_skew", "0")));
      break;
  }
  return LevyModel(beta, sigma, law);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  for (const auto& k : kKinds) {
    if (s == k.name) return k.kind;
  }
  throw ConfigError("unknown experiment kind '" + s + "'");
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> v;
    for (const auto& k : kKinds) v.push_back(k.kind);
    return v;
  }();
  return kinds;
}

double ExperimentConfig::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : to_double("params." + key, it->second);
}

std::size_t ExperimentConfig::param_count(const std::string& key, std::size_t fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback
                            : static_cast<std::size_t>(to_u64("params." + key, it->second));
}

std::vector<double> ExperimentConfig::param_list(const std::string& key,
                                                 std::vector<double> fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : parse_double_list(it->second);
}

bool ExperimentConfig::param_flag(const std::string& key, bool fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : to_bool("params." + key, it->second);
}

double ExperimentConfig::effective_zero_tol() const {
  if (thresholds.zero_tol >= 0.0) return thresholds.zero_tol;
  if (!model) return 0.0;
  return default_zero_tol(*model, budget.dt);
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double("list", item));
  }
  return out;
}

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

ExperimentConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [name, _] : tree) {
    if (name != "experiment" && name != "model" && name != "budget" && name != "thresholds" &&
        name != "params") {
      throw ConfigError("config: unknown section [" + name + "]");
    }
  }
  ExperimentConfig c;
  const pt::ptree empty;
  const auto section = [&](const char* name) -> const pt::ptree& {
    const auto child = tree.get_child_optional(name);
    return child ? *child : empty;
  };

  const auto& e = section("experiment");
  reject_unknown(e, "experiment", {"kind", "seed", "shards", "out"});
  if (!has(e, "kind")) throw ConfigError("config: [experiment] kind is required");
  c.kind = parse_experiment_kind(get(e, "kind", ""));
  c.seed = to_u64("experiment.seed", get(e, "seed", "0"));
  const auto shards = to_u64("experiment.shards", get(e, "shards", "1"));
  if (shards == 0 || shards > 4096) throw ConfigError("experiment.shards must be in [1, 4096]");
  c.shards = static_cast<std::uint32_t>(shards);
  c.out_dir = get(e, "out", "out");

  if (const auto m = tree.get_child_optional("model")) {
    try {
      c.model = parse_model(*m);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("model: ") + ex.what());
    }
  }

  const auto& b = section("budget");
  reject_unknown(b, "budget", {"horizon", "dt", "window_end", "replicas"});
  c.budget.horizon = to_double("budget.horizon", get(b, "horizon", format_double(c.budget.horizon)));
  c.budget.dt = to_double("budget.dt", get(b, "dt", format_double(c.budget.dt)));
  c.budget.window_end = to_double("budget.window_end", get(b, "window_end", "0"));
  c.budget.replicas = static_cast<std::size_t>(
      to_u64("budget.replicas", get(b, "replicas", std::to_string(c.budget.replicas))));

  const auto& t = section("thresholds");
  reject_unknown(t, "thresholds", {"t", "x", "delta", "zero_tol", "x0"});
  c.thresholds.t_levels = parse_double_list(get(t, "t", ""));
  c.thresholds.x_levels = parse_double_list(get(t, "x", ""));
  c.thresholds.delta = to_double("thresholds.delta", get(t, "delta", "0"));
  c.thresholds.zero_tol = to_double("thresholds.zero_tol", get(t, "zero_tol", "-1"));
  c.thresholds.x0 = to_double("thresholds.x0", get(t, "x0", "0"));

  for (const auto& [key, value] : section("params")) c.params[key] = trim(value.data());
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_model(const ProcessSpec& spec) {
  std::string out = "[model]\n";
  if (const auto* s = std::get_if<StableParams>(&spec)) {
    out += "type = stable\n";
    out += "alpha = " + format_double(s->alpha()) + "\n";
    out += "rho = " + format_double(s->rho()) + "\n";
    out += std::string("spectrally_positive = ") + (s->spectrally_positive() ? "true" : "false") + "\n";
    return out;
  }
  const auto& m = std::get<LevyModel>(spec);
  const auto& j = m.jumps();
  out += "type = levy\n";
  out += "beta = " + format_double(m.beta_drift()) + "\n";
  out += "sigma = " + format_double(m.sigma()) + "\n";
  out += "jumps = " + to_string(j.kind()) + "\n";
  switch (j.kind()) {
    case JumpKind::none:
      break;
    case JumpKind::compound_pareto:
      out += "jump_rate = " + format_double(j.rate()) + "\n";
      out += "jump_scale = " + format_double(j.scale()) + "\n";
      out += "jump_theta = " + format_double(j.theta()) + "\n";
      break;
    case JumpKind::compound_exponential:
      out += "jump_rate = " + format_double(j.rate()) + "\n";
      out += "jump_mean = " + format_double(j.mean_size()) + "\n";
      break;
    case JumpKind::stable_jumps:
      out += "jump_alpha = " + format_double(j.alpha()) + "\n";
      out += "jump_skew = " + format_double(j.skew()) + "\n";
      break;
  }
  if (j.kind() == JumpKind::compound_pareto || j.kind() == JumpKind::compound_exponential) {
    out += "jump_side = " + to_string(j.side()) + "\n";
    if (j.side() == JumpSide::two_sided) {
      out += "positive_fraction = " + format_double(j.positive_fraction()) + "\n";
    }
  }
  return out;
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

std::string serialize(const ExperimentConfig& c) {
  std::string out;
  out += "[experiment]\n";
  out += "kind = " + to_string(c.kind) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  out += "shards = " + std::to_string(c.shards) + "\n";
  out += "out = " + c.out_dir + "\n";
  if (c.model) out += "\n" + serialize_model(*c.model);
  out += "\n[budget]\n";
  out += "horizon = " + format_double(c.budget.horizon) + "\n";
  out += "dt = " + format_double(c.budget.dt) + "\n";
  out += "window_end = " + format_double(c.budget.window_end) + "\n";
  out += "replicas = " + std::to_string(c.budget.replicas) + "\n";
  out += "\n[thresholds]\n";
  out += "t = " + join(c.thresholds.t_levels) + "\n";
  out += "x = " + join(c.thresholds.x_levels) + "\n";
  out += "delta = " + format_double(c.thresholds.delta) + "\n";
  out += "zero_tol = " + format_double(c.thresholds.zero_tol) + "\n";
  out += "x0 = " + format_double(c.thresholds.x0) + "\n";
  if (!c.params.empty()) {
    out += "\n[params]\n";
    for (const auto& [k, v] : c.params) out += k + " = " + v + "\n";
  }
  return out;
}

namespace {

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("config: " + message);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

const LevyModel& require_levy(const ExperimentConfig& c, const char* kind) {
  check(c.model.has_value(), std::string(kind) + " requires a [model] section");
  const auto* m = std::get_if<LevyModel>(&*c.model);
  check(m != nullptr, std::string(kind) + " requires model.type = levy");
  return *m;
}

const StableParams& require_stable(const ExperimentConfig& c, const char* kind) {
  check(c.model.has_value(), std::string(kind) + " requires a [model] section");
  const auto* s = std::get_if<StableParams>(&*c.model);
  check(s != nullptr, std::string(kind) + " requires model.type = stable");
  return *s;
}

void require_big_jump_model(const LevyModel& m, const char* kind) {
  check(m.beta_drift() > 0.0, std::string(kind) + " requires beta > 0");
  check(m.jumps().kind() == JumpKind::compound_pareto,
        std::string(kind) + " requires compound_pareto jumps");
  check(m.jumps().theta() > 1.0, std::string(kind) + " requires theta > 1");
  m.require_regular_upward();
}

double conditioning_scale(const ProcessSpec& spec, double t) {
  if (const auto* s = std::get_if<StableParams>(&spec)) return s->norming(t);
  const auto& m = std::get<LevyModel>(spec);
  if (m.beta_drift() > 0.0) return m.beta_drift() * t;
  return m.sigma() * std::sqrt(t);
}

}  // namespace

void validate(const ExperimentConfig& c) {
  const auto& b = c.budget;
  const auto& th = c.thresholds;
  check(positive(b.horizon), "budget.horizon must be > 0");
  check(positive(b.dt), "budget.dt must be > 0");
  check(b.dt <= b.horizon, "budget.dt must not exceed budget.horizon");
  check(b.replicas > 0, "budget.replicas must be > 0");
  check(b.window_end >= 0.0 && b.window_end <= b.horizon, "budget.window_end must lie in [0, horizon]");
  check(c.shards > 0, "experiment.shards must be > 0");
  check(th.delta == 0.0 || th.delta >= b.dt, "thresholds.delta must be >= dt");
  check(th.delta >= 0.0, "thresholds.delta must be >= 0");
  check(th.x0 >= 0.0 && std::isfinite(th.x0), "thresholds.x0 must be >= 0");
  for (double t : th.t_levels) check(positive(t), "thresholds.t entries must be > 0");
  for (double x : th.x_levels) check(positive(x), "thresholds.x entries must be > 0");

  if (c.model && th.x0 > 0.0 && !th.t_levels.empty()) {
    const double tmin = *std::min_element(th.t_levels.begin(), th.t_levels.end());
    check(th.x0 < conditioning_scale(*c.model, tmin),
          "thresholds.x0 must be below the conditioning scale at the smallest t");
  }

  switch (c.kind) {
    case ExperimentKind::closed_forms:
    case ExperimentKind::scalefn:
      break;
    case ExperimentKind::brownian_baseline:
    case ExperimentKind::arcsine: {
      const auto& m = require_levy(c, to_string(c.kind).c_str());
      check(m.beta_drift() == 0.0 && m.sigma() > 0.0 && m.jumps().kind() == JumpKind::none,
            to_string(c.kind) + " requires a driftless Brownian model (beta = 0, sigma > 0, no jumps)");
      break;
    }
    case ExperimentKind::meander: {
      const auto& s = require_stable(c, "meander");
      check(s.alpha() > 1.0, "meander requires alpha > 1");
      check(th.t_levels.size() >= 2, "meander needs at least two t levels");
      check(th.x0 > 0.0, "meander needs thresholds.x0 > 0");
      break;
    }
    case ExperimentKind::height_tail: {
      const auto& s = require_stable(c, "height_tail");
      check(s.spectrally_positive() && s.alpha() > 1.0,
            "height_tail requires a spectrally positive oscillating model (alpha in (1, 2))");
      check(!th.t_levels.empty(), "height_tail needs t levels");
      break;
    }
    case ExperimentKind::equivalence:
    case ExperimentKind::big_jump:
    case ExperimentKind::drift_profile: {
      const auto& m = require_levy(c, to_string(c.kind).c_str());
      require_big_jump_model(m, to_string(c.kind).c_str());
      check(!th.t_levels.empty(), to_string(c.kind) + " needs a t level");
      break;
    }
    case ExperimentKind::conditioned_start: {
      const auto& m = require_levy(c, "conditioned_start");
      require_big_jump_model(m, "conditioned_start");
      check(!th.t_levels.empty(), "conditioned_start needs a t level");
      check(th.x0 > 0.0, "conditioned_start needs thresholds.x0 > 0");
      break;
    }
  }
}

}  // namespace lexc
