#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexc/levy_model.hpp"

namespace lexc {

enum class ExperimentKind {
  closed_forms,
  brownian_baseline,
  arcsine,
  meander,
  height_tail,
  equivalence,
  big_jump,
  drift_profile,
  conditioned_start,
  scalefn,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& s);
const std::vector<ExperimentKind>& all_experiment_kinds();

struct Budget {
  double horizon = 10.0;
  double dt = 1e-3;
  // Excursions are counted if they start before window_end; the rest of the
  // horizon only resolves their lifetimes. 0 means the full horizon.
  double window_end = 0.0;
  std::size_t replicas = 100;
};

struct Thresholds {
  std::vector<double> t_levels;
  std::vector<double> x_levels;
  // 0 means "dt".
  double delta = 0.0;
  // Negative means default_zero_tol(model, dt).
  double zero_tol = -1.0;
  double x0 = 0.0;
};

// Flat key-value experiment description. INI layout:
//
//   [experiment] kind, seed, shards, out
//   [model]      type = levy | stable, then
//                levy:   beta, sigma, jumps, jump_rate, jump_scale, jump_theta,
//                        jump_mean, jump_side, positive_fraction
//                stable: alpha, rho, spectrally_positive
//   [budget]     horizon, dt, window_end, replicas
//   [thresholds] t, x (comma lists), delta, zero_tol, x0
//   [params]     experiment specific knobs
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::closed_forms;
  std::optional<ProcessSpec> model;
  Budget budget;
  Thresholds thresholds;
  std::uint64_t seed = 0;
  std::uint32_t shards = 1;
  std::string out_dir = "out";
  std::map<std::string, std::string> params;

  double param(const std::string& key, double fallback) const;
  std::size_t param_count(const std::string& key, std::size_t fallback) const;
  std::vector<double> param_list(const std::string& key, std::vector<double> fallback) const;
  bool param_flag(const std::string& key, bool fallback) const;

  double effective_delta() const { return thresholds.delta > 0.0 ? thresholds.delta : budget.dt; }
  double effective_window_end() const {
    return budget.window_end > 0.0 ? budget.window_end : budget.horizon;
  }
  double effective_zero_tol() const;
};

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

// Lossless text form (17 significant digits); parse_config(serialize(c)) == c.
std::string serialize(const ExperimentConfig& config);
std::string serialize_model(const ProcessSpec& spec);

// Throws ConfigError for impossible or incompatible settings.
void validate(const ExperimentConfig& config);

std::vector<double> parse_double_list(const std::string& text);
std::string format_double(double x);

}  // namespace lexc
