#include "lexc/measure_est.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "lexc/errors.hpp"
#include "lexc/parallel.hpp"
#include "lexc/pathsim.hpp"

namespace lexc {

namespace {

constexpr double kZ95 = 1.959963984540054;

}  // namespace

Event lifetime_exceeds(double t) {
  return [t](const Excursion& e) { return e.lifetime > t; };
}

Event height_exceeds(double x) {
  return [x](const Excursion& e) { return e.height > x; };
}

Event has_jump_exceeding(double x) {
  return [x](const Excursion& e) { return first_big_jump(e, x).has_value(); };
}

Event both(Event a, Event b) {
  return [a = std::move(a), b = std::move(b)](const Excursion& e) { return a(e) && b(e); };
}

CountedEstimate conditional_tail_ratio(const ExcursionEnsemble& ens, const Event& a,
                                       const Event& b, std::size_t min_count) {
  std::size_t nb = 0, nab = 0;
  for (const auto& e : ens.excursions) {
    if (!b(e)) continue;
    ++nb;
    if (a(e)) ++nab;
  }
  if (nb < std::max<std::size_t>(min_count, 1)) {
    throw InsufficientDataError("conditional_tail_ratio: too few excursions in the conditioning event", nb);
  }
  CountedEstimate out;
  out.value = static_cast<double>(nab) / static_cast<double>(nb);
  std::tie(out.ci_lo, out.ci_hi) = wilson_interval(nab, nb);
  out.n = nb;
  out.numerator = nab;
  out.denominator = nb;
  return out;
}

CountedEstimate measure_ratio(const ExcursionEnsemble& ens, const Event& a, const Event& b,
                              std::size_t min_count) {
  std::size_t na = 0, nb = 0, nab = 0;
  for (const auto& e : ens.excursions) {
    const bool ia = a(e), ib = b(e);
    na += ia;
    nb += ib;
    nab += ia && ib;
  }
  const std::size_t floor = std::max<std::size_t>(min_count, 1);
  if (nb < floor) throw InsufficientDataError("measure_ratio: too few denominator events", nb);
  if (na < floor) throw InsufficientDataError("measure_ratio: too few numerator events", na);
  const double fa = static_cast<double>(na), fb = static_cast<double>(nb);
  const double var = std::max(0.0, 1.0 / fa + 1.0 / fb - 2.0 * static_cast<double>(nab) / (fa * fb));
  const double sd = std::sqrt(var);
  CountedEstimate out;
  out.value = fa / fb;
  out.ci_lo = out.value * std::exp(-kZ95 * sd);
  out.ci_hi = out.value * std::exp(kZ95 * sd);
  out.n = nb;
  out.numerator = na;
  out.denominator = nb;
  return out;
}

NZetaEstimate estimate_n_zeta(const ExcursionEnsemble& ens, std::size_t min_count) {
  if (ens.model_class == ModelClass::oscillating) {
    throw UnsupportedError("estimate_n_zeta: n(zeta) is infinite for oscillating processes");
  }
  std::size_t count = 0;
  double mean = 0.0, var = 0.0;
  if (ens.tally.count > 0) {
    count = ens.tally.count;
    const double n = static_cast<double>(count);
    mean = ens.tally.sum / n;
    var = count > 1 ? std::max(0.0, (ens.tally.sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  } else {
    std::vector<double> life;
    for (const auto& e : ens.excursions) {
      if (!e.censored() && e.lifetime >= ens.delta) life.push_back(e.lifetime);
    }
    count = life.size();
    if (count > 0) mean = sample_mean(life);
    if (count > 1) var = sample_variance(life);
  }
  if (count < std::max<std::size_t>(min_count, 1)) {
    throw InsufficientDataError("estimate_n_zeta: too few uncensored excursions", count);
  }
  NZetaEstimate out;
  out.n_uncensored = count;
  out.mean_lifetime = mean;
  const double se = std::sqrt(var / static_cast<double>(count));
  out.ci_lo = out.mean_lifetime - kZ95 * se;
  out.ci_hi = out.mean_lifetime + kZ95 * se;
  out.per_local_time = ens.local_time_total > 0.0 ? ens.horizon_total / ens.local_time_total
                                                  : std::numeric_limits<double>::quiet_NaN();
  out.bias_note =
      "mean lifetime excludes excursions shorter than delta and censored ones; "
      "long-lifetime censoring biases it low";
  return out;
}

// --- size-biased samplers ------------------------------------------------------

SizeBiasedSampler::SizeBiasedSampler(std::vector<double> lengths) : lengths_(std::move(lengths)) {
  if (lengths_.empty()) throw InsufficientDataError("SizeBiasedSampler: no lengths", 0);
  for (double l : lengths_) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw DomainError("SizeBiasedSampler: lengths must be finite and >= 0");
  }
  std::sort(lengths_.begin(), lengths_.end());
  cumulative_.resize(lengths_.size());
  std::partial_sum(lengths_.begin(), lengths_.end(), cumulative_.begin());
  if (!(cumulative_.back() > 0.0)) throw DomainError("SizeBiasedSampler: total length is zero");
}

SizeBiasedSampler::SizeBiasedSampler(std::vector<double> lengths, double total_mass, double short_length)
    : SizeBiasedSampler(std::move(lengths)) {
  if (!(short_length > 0.0) || !std::isfinite(short_length)) {
    throw DomainError("SizeBiasedSampler: short_length must be finite and > 0");
  }
  if (!std::isfinite(total_mass)) throw DomainError("SizeBiasedSampler: total_mass must be finite");
  extra_ = std::max(0.0, total_mass - cumulative_.back());
  short_ = short_length;
}

double SizeBiasedSampler::sample(RngStream& rng) const {
  const double u = rng.uniform() * (cumulative_.back() + extra_);
  if (u < extra_) return rng.uniform() * short_;
  const double target = u - extra_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) --it;
  const double len = lengths_[static_cast<std::size_t>(it - cumulative_.begin())];
  return rng.uniform() * len;
}

double SizeBiasedSampler::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  // lengths below t contribute fully, the rest contribute t each
  const auto it = std::upper_bound(lengths_.begin(), lengths_.end(), t);
  const auto k = static_cast<std::size_t>(it - lengths_.begin());
  const double below = k == 0 ? 0.0 : cumulative_[k - 1];
  const double above = t * static_cast<double>(lengths_.size() - k);
  const double pooled = extra_ > 0.0 ? extra_ * std::min(t, short_) / short_ : 0.0;
  return std::min(1.0, (pooled + below + above) / (cumulative_.back() + extra_));
}

double SizeBiasedSampler::mean_length() const {
  return cumulative_.back() / static_cast<double>(lengths_.size());
}

SizeBiasedSampler make_T_sampler(const ExcursionEnsemble& ens, bool pad_to_horizon) {
  if (pad_to_horizon) {
    if (ens.lifetime_sample.empty() || !(ens.lifetime_sample_horizon > 0.0) || !(ens.delta > 0.0)) {
      throw InsufficientDataError("make_T_sampler: padding needs a recorded lifetime sample and delta > 0", 0);
    }
    return SizeBiasedSampler(ens.lifetime_sample, ens.lifetime_sample_horizon, ens.delta);
  }
  if (!ens.lifetime_sample.empty()) return SizeBiasedSampler(ens.lifetime_sample);
  std::vector<double> life;
  life.reserve(ens.size());
  for (const auto& e : ens.excursions) {
    if (!e.censored()) life.push_back(e.lifetime);
  }
  return SizeBiasedSampler(std::move(life));
}

double sample_T(const ExcursionEnsemble& ens, RngStream& rng, bool pad_to_horizon) {
  return make_T_sampler(ens, pad_to_horizon).sample(rng);
}

std::vector<double> first_passage_times(const ProcessSpec& spec, double x, std::size_t n,
                                        const FirstPassageOptions& options,
                                        std::size_t* censored) {
  if (!(x > 0.0)) throw DomainError("first_passage_times: start must be > 0");
  if (!(options.cap > 0.0)) throw ConfigError("first_passage_times: cap must be > 0");
  const std::uint32_t shards = std::max<std::uint32_t>(1, options.shards);
  struct Part {
    std::vector<std::pair<std::size_t, double>> taus;
    std::size_t censored = 0;
  };
  auto parts = run_shards(shards, [&](std::uint32_t shard) {
    Part part;
    for (std::size_t i = shard, local = 0; i < n; i += shards, ++local) {
      RngStream rng(options.seed, shard, static_cast<std::uint32_t>(local));
      PathStepper stepper(spec, SimOptions{options.dt, -1.0}, x, rng, options.cap);
      double tau = options.cap;
      bool hit = false;
      while (stepper.advance()) {
        if (stepper.value() < 0.0 || stepper.last_left_limit() < 0.0) {
          tau = stepper.time();
          hit = true;
          break;
        }
      }
      if (!hit) ++part.censored;
      part.taus.emplace_back(i, tau);
    }
    return part;
  });
  std::vector<double> out(n);
  std::size_t cens = 0;
  for (const auto& p : parts) {
    cens += p.censored;
    for (const auto& [i, tau] : p.taus) out[i] = tau;
  }
  if (censored) *censored = cens;
  return out;
}

TxSampler sample_T_x(const ProcessSpec& spec, double x, std::span<const double> t_grid,
                     std::size_t n_mc, const FirstPassageOptions& options) {
  const auto* model = std::get_if<LevyModel>(&spec);
  if (!model || !(model->beta_drift() > 0.0) || !model->finite_mean_jumps()) {
    throw UnsupportedError("sample_T_x: requires a Levy model with negative mean (beta > 0)");
  }
  if (n_mc < 2) throw InsufficientDataError("sample_T_x: need at least two first passages", n_mc);
  std::size_t cens = 0;
  std::vector<double> taus = first_passage_times(spec, x, n_mc, options, &cens);
  TxSampler out;
  out.n = n_mc;
  out.mean_tau = sample_mean(taus);
  out.mean_tau_se = std::sqrt(sample_variance(taus) / static_cast<double>(n_mc));
  out.censored_frac = static_cast<double>(cens) / static_cast<double>(n_mc);
  out.sampler = SizeBiasedSampler(std::move(taus));
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  for (double t : out.t_grid) out.cdf_on_grid.push_back(out.sampler.cdf(t));
  return out;
}

double sample_pareto_limit(double beta, double theta, RngStream& rng) {
  if (!(beta > 0.0) || !(theta > 0.0)) throw DomainError("sample_pareto_limit: beta, theta must be > 0");
  return beta * std::pow(rng.uniform(), -1.0 / theta);
}

// --- conditioned excursions ----------------------------------------------------

ConditionedExcursionSampler::ConditionedExcursionSampler(ProcessSpec spec, Condition condition,
                                                         double x0, ConditionedOptions options)
    : spec_(std::move(spec)), condition_(condition), x0_(x0), options_(options) {
  if (!(x0 > 0.0)) throw DomainError("conditioned sampler: x0 must be > 0");
  if (!(condition.level > 0.0)) throw DomainError("conditioned sampler: level must be > 0");
  if (condition.kind == ConditionKind::height && !(x0 < condition.level)) {
    throw ConfigError("conditioned sampler: x0 must be below the height level");
  }
  if (!(options.dt > 0.0)) throw ConfigError("conditioned sampler: dt must be > 0");
  if (options_.censor_time <= 0.0) {
    options_.censor_time = 100.0 * std::max(condition.level, options.dt);
  }
}

Excursion ConditionedExcursionSampler::next(RngStream& rng) {
  const double floor = options_.acceptance_floor;
  for (;;) {
    if (trials_ >= options_.min_trials_before_floor && floor > 0.0) {
      const double upper = wilson_interval(accepted_, trials_).second;
      if (upper < floor) {
        throw AcceptanceFloorError("conditioned sampler: acceptance below floor", acceptance_rate());
      }
    }
    ++trials_;
    PathStepper stepper(spec_, SimOptions{options_.dt, -1.0}, x0_, rng, options_.censor_time);
    buffer_.clear();
    stepper.begin(buffer_);
    bool met = false;
    bool killed = false;
    double height = x0_;
    while (stepper.step(buffer_)) {
      if (stepper.value() < 0.0 || stepper.last_left_limit() < 0.0) {
        killed = true;
        break;
      }
      height = std::max(height, stepper.value());
      if (!met) {
        met = condition_.kind == ConditionKind::lifetime ? stepper.time() > condition_.level
                                                         : height > condition_.level;
        if (met && !options_.run_to_extinction) break;
      }
      if (met && height > options_.stop_height) break;
    }
    if (!met) continue;
    ++accepted_;

    Excursion exc;
    exc.height = height;
    exc.end = killed ? EndFlag::closed : EndFlag::censored;
    const std::size_t n = buffer_.size();
    const std::size_t last = killed ? n - 1 : n;
    exc.times.assign(buffer_.times.begin(), buffer_.times.begin() + static_cast<long>(last));
    exc.values.assign(buffer_.values.begin(), buffer_.values.begin() + static_cast<long>(last));
    for (const auto& j : buffer_.jumps) {
      if (j.index < last) exc.jumps.push_back({buffer_.times[j.index], j.size});
    }
    if (killed) {
      exc.times.push_back(buffer_.times.back());
      exc.values.push_back(0.0);
    }
    exc.lifetime = buffer_.times.back();
    return exc;
  }
}

Excursion sample_conditioned_excursion(const ProcessSpec& spec, Condition condition, double x0,
                                       RngStream& rng, const ConditionedOptions& options) {
  ConditionedExcursionSampler sampler(spec, condition, x0, options);
  return sampler.next(rng);
}

ConditionedStartSampler::ConditionedStartSampler(ProcessSpec spec, double x, double t,
                                                 double extension, ConditionedOptions options)
    : spec_(std::move(spec)), x_(x), t_(t), extension_(extension), options_(options) {
  if (!(x > 0.0)) throw DomainError("conditioned start: x must be > 0");
  if (!(t > 0.0) || !(extension >= 0.0)) throw DomainError("conditioned start: bad time range");
  if (!(options.dt > 0.0)) throw ConfigError("conditioned start: dt must be > 0");
}

Path ConditionedStartSampler::next(RngStream& rng) {
  const double floor = options_.acceptance_floor;
  Path path;
  for (;;) {
    if (trials_ >= options_.min_trials_before_floor && floor > 0.0) {
      const double upper = wilson_interval(accepted_, trials_).second;
      if (upper < floor) {
        throw AcceptanceFloorError("conditioned start: acceptance below floor", acceptance_rate());
      }
    }
    ++trials_;
    PathStepper stepper(spec_, SimOptions{options_.dt, -1.0}, x_, rng, t_ + extension_);
    stepper.begin(path);
    bool killed = false;
    while (stepper.step(path)) {
      if (stepper.time() > t_) continue;
      if (stepper.value() < 0.0 || stepper.last_left_limit() < 0.0) {
        killed = true;
        break;
      }
    }
    if (killed) continue;
    ++accepted_;
    return path;
  }
}

double path_value_at(const Path& path, double s) {
  if (path.empty()) throw ContractViolation("path_value_at: empty path");
  auto it = std::upper_bound(path.times.begin(), path.times.end(), s);
  if (it == path.times.begin()) return path.values.front();
  return path.values[static_cast<std::size_t>(it - path.times.begin()) - 1];
}

MeanderSample extract_meander(const Excursion& exc, double t, double alpha) {
  if (!(exc.lifetime > t)) throw ContractViolation("extract_meander: lifetime must exceed t");
  if (!exc.has_values()) throw ContractViolation("extract_meander: excursion has no stored values");
  const double norm = std::pow(t, 1.0 / alpha);
  MeanderSample out;
  for (std::size_t i = 0; i < exc.times.size() && exc.times[i] < t; ++i) {
    out.s.push_back(exc.times[i] / t);
    out.values.push_back(exc.values[i] / norm);
  }
  out.endpoint = exc.value_at(t) / norm;
  out.s.push_back(1.0);
  out.values.push_back(out.endpoint);
  return out;
}

ExcursionEnsemble collect_natural_ensemble(const ProcessSpec& spec, const NaturalRunConfig& config) {
  if (!(config.window_end > 0.0) || config.window_end > config.horizon) {
    throw ConfigError("natural run: window_end must lie in (0, horizon]");
  }
  const std::uint32_t shards = std::max<std::uint32_t>(1, config.shards);
  DecomposeOptions dopt = config.decompose;
  dopt.window_end = config.window_end;
  auto parts = run_shards(shards, [&](std::uint32_t shard) {
    ExcursionEnsemble part;
    part.delta = dopt.min_lifetime;
    part.zero_tol = dopt.zero_tol;
    for (std::size_t r = shard, local = 0; r < config.replicas; r += shards, ++local) {
      RngStream rng(config.seed, shard, static_cast<std::uint32_t>(local));
      Path path = simulate(spec, config.horizon, config.dt, config.x0, rng);
      DecomposeOptions local_opt = dopt;
      local_opt.record_lifetimes = dopt.record_lifetimes || r < config.record_lifetime_replicas;
      ExcursionEnsemble one = decompose_excursions(path, local_opt);
      if (config.keep) {
        std::erase_if(one.excursions, [&](const Excursion& e) { return !config.keep(e); });
      }
      for (auto& e : one.excursions) {
        e.shard = shard;
        e.replica = static_cast<std::uint32_t>(r);
      }
      part.merge(std::move(one));
    }
    return part;
  });
  ExcursionEnsemble out;
  out.delta = dopt.min_lifetime;
  out.zero_tol = dopt.zero_tol;
  out.model_class = config.model_class;
  out.model_tag = describe(spec);
  for (auto& p : parts) out.merge(std::move(p));
  return out;
}

}  // namespace lexc
