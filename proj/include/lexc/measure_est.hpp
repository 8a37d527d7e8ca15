#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lexc/excursion.hpp"
#include "lexc/levy_model.hpp"
#include "lexc/rng.hpp"
#include "lexc/stats.hpp"

namespace lexc {

// --- events and ratio estimators ---------------------------------------------

using Event = std::function<bool(const Excursion&)>;

Event lifetime_exceeds(double t);
Event height_exceeds(double x);
Event has_jump_exceeding(double x);
Event both(Event a, Event b);

struct CountedEstimate : Estimate {
  std::size_t numerator = 0;
  std::size_t denominator = 0;
};

// #(A and B) / #(B) with a Wilson 95% interval.
CountedEstimate conditional_tail_ratio(const ExcursionEnsemble& ens, const Event& a,
                                       const Event& b, std::size_t min_count = 100);

// #(A) / #(B): an estimate of n(A)/n(B) that does not depend on the minimum
// lifetime used to build the ensemble. The interval treats counts as Poisson
// with the covariance induced by their overlap.
CountedEstimate measure_ratio(const ExcursionEnsemble& ens, const Event& a, const Event& b,
                              std::size_t min_count = 100);

struct NZetaEstimate {
  // Mean lifetime over uncensored excursions with lifetime >= delta, an
  // estimate of n(zeta; zeta > delta) / n(zeta > delta).
  double mean_lifetime = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_uncensored = 0;
  // Observation time per unit decrease of the running infimum. For
  // spectrally positive processes -inf X is a local time at the infimum with
  // renewal function x, so this estimates n(zeta) in that normalization.
  double per_local_time = 0.0;
  std::string bias_note;
};

NZetaEstimate estimate_n_zeta(const ExcursionEnsemble& ens, std::size_t min_count = 1000);

// --- size-biased samplers ------------------------------------------------------

// Law with CDF t -> sum_i min(L_i, t) / sum_i L_i: pick i with probability
// proportional to L_i, then draw Uniform(0, L_i).
//
// With total_mass > sum_i L_i the missing mass stands for lengths too short to
// observe and is spread uniformly over [0, short_length]:
//   CDF(t) = (extra * min(t, short_length) / short_length + sum_i min(L_i, t)) / total_mass.
class SizeBiasedSampler {
 public:
  SizeBiasedSampler() = default;
  explicit SizeBiasedSampler(std::vector<double> lengths);
  SizeBiasedSampler(std::vector<double> lengths, double total_mass, double short_length);

  double sample(RngStream& rng) const;
  double cdf(double t) const;
  double mean_length() const;
  std::size_t size() const noexcept { return lengths_.size(); }

 private:
  std::vector<double> lengths_;     // ascending
  std::vector<double> cumulative_;  // prefix sums of lengths_
  double extra_ = 0.0;
  double short_ = 0.0;
};

// Sampler for the jump time T, P(T <= t) = n(zeta ^ t) / n(zeta), from the
// uncensored lifetimes of the ensemble. With pad_to_horizon the normalizer is
// the observed time of the recording paths instead of the summed lifetimes;
// valid when the time spent at the infimum is null (0 regular upwards), and
// needed when most of that time sits in excursions shorter than delta.
SizeBiasedSampler make_T_sampler(const ExcursionEnsemble& ens, bool pad_to_horizon = false);
double sample_T(const ExcursionEnsemble& ens, RngStream& rng, bool pad_to_horizon = false);

struct FirstPassageOptions {
  double dt = 1e-2;
  // tau above this cap is censored at the cap.
  double cap = 1e4;
  std::uint32_t shards = 1;
  std::uint64_t seed = 0;
};

struct TxSampler {
  SizeBiasedSampler sampler;  // over tau_0^- samples (censored ones at the cap)
  double mean_tau = 0.0;
  double mean_tau_se = 0.0;
  std::size_t n = 0;
  double censored_frac = 0.0;
  std::vector<double> t_grid;
  std::vector<double> cdf_on_grid;  // E[tau ^ t] / E[tau]

  double sample(RngStream& rng) const { return sampler.sample(rng); }
};

// Monte Carlo first passages below 0 started from x > 0.
std::vector<double> first_passage_times(const ProcessSpec& spec, double x, std::size_t n,
                                        const FirstPassageOptions& options,
                                        std::size_t* censored = nullptr);

TxSampler sample_T_x(const ProcessSpec& spec, double x, std::span<const double> t_grid,
                     std::size_t n_mc, const FirstPassageOptions& options);

// Pareto(beta, theta) limit of the rescaled big jump.
double sample_pareto_limit(double beta, double theta, RngStream& rng);

// --- conditioned excursions ----------------------------------------------------

enum class ConditionKind { lifetime, height };

struct Condition {
  ConditionKind kind = ConditionKind::lifetime;
  double level = 1.0;
};

struct ConditionedOptions {
  double dt = 1e-3;
  double acceptance_floor = 1e-5;
  // Accepted excursions still alive at this time are censored; <= 0 means
  // 100 x level.
  double censor_time = -1.0;
  std::size_t min_trials_before_floor = 1000;
  // Keep simulating past the conditioning event until the path goes below 0.
  bool run_to_extinction = true;
  // After acceptance, stop (censored) once the height exceeds this level.
  double stop_height = std::numeric_limits<double>::infinity();
};

// Rejection sampler for the excursion law conditioned on lifetime > t or
// height > x, approximated by the process started at a small x0 and killed
// below 0. Returned excursions carry values X_s on [0, zeta) and 0 at zeta.
class ConditionedExcursionSampler {
 public:
  ConditionedExcursionSampler(ProcessSpec spec, Condition condition, double x0,
                              ConditionedOptions options = {});

  Excursion next(RngStream& rng);

  std::size_t trials() const noexcept { return trials_; }
  std::size_t accepted() const noexcept { return accepted_; }
  double acceptance_rate() const noexcept {
    return trials_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(trials_);
  }

 private:
  ProcessSpec spec_;
  Condition condition_;
  double x0_;
  ConditionedOptions options_;
  std::size_t trials_ = 0;
  std::size_t accepted_ = 0;
  Path buffer_;
};

Excursion sample_conditioned_excursion(const ProcessSpec& spec, Condition condition, double x0,
                                       RngStream& rng, const ConditionedOptions& options = {});

// Path from x conditioned on staying >= 0 up to t, continued without killing
// until t + extension.
class ConditionedStartSampler {
 public:
  ConditionedStartSampler(ProcessSpec spec, double x, double t, double extension,
                          ConditionedOptions options = {});

  Path next(RngStream& rng);

  std::size_t trials() const noexcept { return trials_; }
  std::size_t accepted() const noexcept { return accepted_; }
  double acceptance_rate() const noexcept {
    return trials_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(trials_);
  }

 private:
  ProcessSpec spec_;
  double x_;
  double t_;
  double extension_;
  ConditionedOptions options_;
  std::size_t trials_ = 0;
  std::size_t accepted_ = 0;
};

// Value of a cadlag path at time s (last grid point <= s).
double path_value_at(const Path& path, double s);

struct MeanderSample {
  std::vector<double> s;       // in [0, 1]
  std::vector<double> values;  // epsilon_{t s} / t^(1/alpha)
  double endpoint = 0.0;
};

// s -> epsilon_{ts} / t^(1/alpha) on [0, 1] for an excursion with lifetime > t.
MeanderSample extract_meander(const Excursion& exc, double t, double alpha);

// --- natural collection from simulated paths ---------------------------------

struct NaturalRunConfig {
  double horizon = 10.0;
  double window_end = 5.0;
  double dt = 1e-3;
  double x0 = 0.0;
  std::size_t replicas = 100;
  std::uint32_t shards = 1;
  std::uint64_t seed = 0;
  DecomposeOptions decompose;
  ModelClass model_class = ModelClass::unknown;
  // Excursions failing the filter are dropped after decomposition (counts of
  // the kept ones are what estimators see).
  Event keep;
  // Replicas with index below this also record every lifetime (for the
  // size-biased jump time sampler).
  std::size_t record_lifetime_replicas = 0;
};

// Replica r runs in shard r % shards on stream (seed, shard, r / shards).
ExcursionEnsemble collect_natural_ensemble(const ProcessSpec& spec, const NaturalRunConfig& config);

}  // namespace lexc
