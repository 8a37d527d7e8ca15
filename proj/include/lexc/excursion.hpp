#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lexc/pathsim.hpp"

namespace lexc {

enum class EndFlag { closed, censored };

struct ExcursionJump {
  double time;  // relative to the excursion start
  double size;
};

// One excursion of X - inf X away from 0.
//
// Grid convention: an excursion occupying grid indices a..b (reflected value
// above zero_tol) starts at the midpoint of (t[a-1], t[a]) and closes at the
// midpoint of (t[b], t[b+1]). On a uniform grid its lifetime is therefore
// (b - a + 1) * dt. Stored values begin and end with 0; censored excursions
// end at the horizon without the trailing 0.
struct Excursion {
  double start_time = 0.0;
  double lifetime = 0.0;
  double height = 0.0;
  std::vector<double> times;   // relative times, empty when values were not kept
  std::vector<double> values;  // nonnegative
  std::vector<ExcursionJump> jumps;
  // Values at DecomposeOptions::probe_times (NaN where lifetime <= probe).
  std::vector<double> probes;
  EndFlag end = EndFlag::closed;
  std::uint32_t shard = 0;
  std::uint32_t replica = 0;

  bool censored() const noexcept { return end == EndFlag::censored; }
  bool has_values() const noexcept { return !values.empty(); }
  // Right-continuous value at relative time s (0 for s >= lifetime of a
  // closed excursion). Requires stored values.
  double value_at(double s) const;
};

enum class ModelClass { unknown, oscillating, negative_drift };

// Running sums over every uncensored excursion with lifetime >= delta that
// started in the window, including those dropped by the keep filter.
struct LifetimeTally {
  std::size_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double lifetime) {
    ++count;
    sum += lifetime;
    sum_sq += lifetime * lifetime;
  }
  void merge(const LifetimeTally& o) {
    count += o.count;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
};

struct ExcursionEnsemble {
  std::vector<Excursion> excursions;
  LifetimeTally tally;
  // Uncensored lifetimes (>= delta) of every excursion when requested.
  std::vector<double> lifetime_sample;
  double lifetime_sample_horizon = 0.0;  // horizon_total of the paths behind lifetime_sample
  double horizon_total = 0.0;     // observation time summed over paths
  double local_time_total = 0.0;  // summed decrease of the running infimum
  double delta = 0.0;
  double zero_tol = 0.0;
  std::string model_tag;
  ModelClass model_class = ModelClass::unknown;
  std::size_t paths = 0;

  std::size_t size() const noexcept { return excursions.size(); }
  bool empty() const noexcept { return excursions.empty(); }
  // Appends `other`; totals add. Order of appends is the caller's reduction order.
  void merge(ExcursionEnsemble other);
};

struct PathStats {
  std::vector<double> running_inf;
  std::vector<double> running_sup;
};

std::vector<double> running_infimum(const Path& path);
std::vector<double> running_supremum(const Path& path);
PathStats path_stats(const Path& path);

struct DecomposeOptions {
  double zero_tol = 0.0;
  double min_lifetime = 0.0;
  // Only excursions starting strictly before this time are kept; horizon_total
  // and local_time_total are measured up to it.
  double window_end = std::numeric_limits<double>::infinity();
  bool keep_censored = false;
  // Excursions shorter than this keep scalar statistics and jumps only.
  double store_values_min_lifetime = 0.0;
  // Excursions are materialized only if lifetime >= keep_min_lifetime or
  // height >= keep_min_height; the tally still sees all of them.
  double keep_min_lifetime = 0.0;
  double keep_min_height = std::numeric_limits<double>::infinity();
  bool record_lifetimes = false;
  // Relative times at which values are recorded for every kept excursion.
  std::vector<double> probe_times;
};

// Default zero tolerance: twice the typical one-step increment of the model.
double default_zero_tol(const ProcessSpec& spec, double dt);

ExcursionEnsemble decompose_excursions(const Path& path, const DecomposeOptions& options);
ExcursionEnsemble decompose_excursions(const Path& path, double zero_tol, double min_lifetime);

std::optional<ExcursionJump> first_big_jump(const Excursion& exc, double threshold);
std::size_t big_jump_count(const Excursion& exc, double threshold, double up_to);

// g_t: last grid time <= t where the path or its left limit sits at the
// running infimum (within zero_tol). Ties resolve to the latest time.
double last_passage_at_infimum(const Path& path, double t, double zero_tol = 1e-12);

// shard,replica,start,lifetime,height,J_time,J_size,censored; the big jump is
// the first jump above `jump_threshold` (empty fields when absent).
void write_ensemble_csv(const ExcursionEnsemble& ens, double jump_threshold, std::ostream& os,
                        const std::string& extra_column = {},
                        const std::string& extra_value = {});

}  // namespace lexc
