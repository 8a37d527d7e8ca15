#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <fmt/format.h>

#include "lexc/errors.hpp"
#include "lexc/excursion.hpp"
#include "lexc/experiments.hpp"
#include "lexc/measure_est.hpp"
#include "lexc/parallel.hpp"
#include "lexc/pathsim.hpp"
#include "lexc/stats.hpp"

namespace lexc {

namespace {

constexpr std::uint32_t kBlock = 1u << 24;

struct DriftSetup {
  const LevyModel* model;
  double beta;
  double theta;
  double t;
  double nu_bar_bt;
};

DriftSetup setup(const ExperimentConfig& config) {
  const auto& m = std::get<LevyModel>(*config.model);
  const double t = config.thresholds.t_levels.front();
  return {&m, m.beta_drift(), m.jumps().theta(), t, nu_bar(m.jumps(), m.beta_drift() * t)};
}

// Natural ensemble keeping only excursions that are long or high.
ExcursionEnsemble drift_ensemble(const ExperimentConfig& config, const DriftSetup& s,
                                 bool store_values) {
  NaturalRunConfig nat;
  nat.horizon = config.budget.horizon;
  nat.window_end = config.effective_window_end();
  nat.dt = config.budget.dt;
  nat.replicas = config.budget.replicas;
  nat.shards = config.shards;
  nat.seed = config.seed;
  nat.model_class = ModelClass::negative_drift;
  nat.decompose.zero_tol = config.effective_zero_tol();
  nat.decompose.min_lifetime = config.effective_delta();
  nat.decompose.keep_censored = false;
  const double keep = config.param("keep_fraction", 0.5);
  nat.decompose.keep_min_lifetime = keep * s.t;
  nat.decompose.keep_min_height = keep * s.beta * s.t;
  nat.decompose.store_values_min_lifetime =
      store_values ? s.t : std::numeric_limits<double>::infinity();
  nat.record_lifetime_replicas = config.param_count(
      "lifetime_sample_replicas", std::max<std::size_t>(1, config.budget.replicas / 20));
  return collect_natural_ensemble(*config.model, nat);
}

std::optional<ExcursionJump> largest_jump(const Excursion& e) {
  std::optional<ExcursionJump> best;
  for (const auto& j : e.jumps) {
    if (j.size > 0.0 && (!best || j.size > best->size)) best = j;
  }
  return best;
}

std::optional<std::pair<double, double>> largest_jump_in_path(const Path& p, double up_to) {
  std::optional<std::pair<double, double>> best;
  for (const auto& j : p.jumps) {
    const double time = p.times[j.index];
    if (time > up_to) break;
    if (j.size > 0.0 && (!best || j.size > best->second)) best = std::make_pair(time, j.size);
  }
  return best;
}

std::vector<double> censor_below(std::vector<double> v, double floor) {
  for (double& x : v) x = std::max(x, floor);
  return v;
}

Json ci_detail(const CountedEstimate& e) {
  return {{"ci_lo", e.ci_lo}, {"ci_hi", e.ci_hi}, {"numerator", e.numerator}, {"denominator", e.denominator}};
}

Json ensemble_facts(const ExcursionEnsemble& ens) {
  return {{"kept_excursions", ens.size()},
          {"detected_excursions", ens.tally.count},
          {"horizon_total", ens.horizon_total},
          {"local_time_total", ens.local_time_total},
          {"lifetime_sample", ens.lifetime_sample.size()}};
}

}  // namespace

Report run_equivalence(const ExperimentConfig& config) {
  const auto s = setup(config);
  Report r;
  r.experiment = "equivalence";
  r.inputs = detail::config_inputs(config);
  const std::string anchor = experiment_table()[5].anchor;
  const auto ens = drift_ensemble(config, s, false);

  const double bt = s.beta * s.t;
  const std::size_t min_count = config.param_count("min_count", 100);
  const auto h_given_l = conditional_tail_ratio(ens, height_exceeds(bt), lifetime_exceeds(s.t), min_count);
  const auto l_given_h = conditional_tail_ratio(ens, lifetime_exceeds(s.t), height_exceeds(bt), min_count);
  const auto nz = estimate_n_zeta(ens, config.param_count("min_count_n_zeta", 1000));
  const auto n_long = static_cast<double>(
      std::count_if(ens.excursions.begin(), ens.excursions.end(), [&](const Excursion& e) { return e.lifetime > s.t; }));
  // both measures per unit local time: n(zeta>t) = #(zeta>t)/L, n(zeta) = per_local_time.
  // The delta-truncated mean lifetime misses sub-grid excursions, so it is only reported.
  const double n_zeta_mass = nz.per_local_time * ens.local_time_total;
  const double tail_ratio = n_long / n_zeta_mass;
  const double normalized = tail_ratio / s.nu_bar_bt;
  const double rel_se = 1.0 / std::sqrt(std::max(n_long, 1.0));

  const double floor = config.param("min_conditional", 0.9);
  Criterion c1 = Criterion::band("height_given_lifetime", fmt::format("n(height > beta t | zeta > t), t={}", s.t),
                                 "1 in the limit", anchor, h_given_l.value, floor, 1.0);
  c1.detail = ci_detail(h_given_l);
  Criterion c2 = Criterion::band("lifetime_given_height", fmt::format("n(zeta > t | height > beta t), t={}", s.t),
                                 "1 in the limit", anchor, l_given_h.value, floor, 1.0);
  c2.detail = ci_detail(l_given_h);
  Criterion c3 = Criterion::band("lifetime_tail_normalized", "n(zeta>t) / (n(zeta) nu_bar(beta t))",
                                 "1 in the limit", anchor, normalized, config.param("ratio_low", 0.8),
                                 config.param("ratio_high", 1.2));
  c3.detail = {{"ci_lo", normalized * (1 - 1.96 * rel_se)}, {"ci_hi", normalized * (1 + 1.96 * rel_se)},
               {"n_long", n_long}, {"n_zeta_per_local_time", nz.per_local_time},
               {"local_time_total", ens.local_time_total}, {"nu_bar_beta_t", s.nu_bar_bt}};
  r.criteria.push_back(std::move(c1));
  r.criteria.push_back(std::move(c2));
  r.criteria.push_back(std::move(c3));
  r.criteria.push_back(Criterion::band("nu_bar_floor", "nu_bar(beta t) at the chosen t", "at least 1e-3",
                                       anchor, s.nu_bar_bt, config.param("min_nu_bar", 1e-3), 1.0));

  r.estimates = {{"height_given_lifetime", h_given_l.value},
                 {"lifetime_given_height", l_given_h.value},
                 {"normalized_tail", normalized},
                 {"n_zeta_mean_lifetime", nz.mean_lifetime},
                 {"n_zeta_per_local_time", nz.per_local_time},
                 {"n_zeta_oracle", 1.0 / s.beta},
                 {"detected_time_fraction",
                  static_cast<double>(nz.n_uncensored) * nz.mean_lifetime / ens.horizon_total},
                 {"nu_bar_beta_t", s.nu_bar_bt},
                 {"ensemble", ensemble_facts(ens)}};

  CsvTable tail{{"t", "n_tail_over_n_zeta", "nu_bar_beta_t"}, {}};
  for (double f : {0.5, 0.75, 1.0, 1.5, 2.0, 3.0}) {
    const double u = f * s.t;
    const auto k = static_cast<double>(
        std::count_if(ens.excursions.begin(), ens.excursions.end(), [&](const Excursion& e) { return e.lifetime > u; }));
    tail.add({u, k / n_zeta_mass, nu_bar(s.model->jumps(), s.beta * u)});
  }
  r.tables["lifetime_tail"] = std::move(tail);
  return r;
}

Report run_big_jump(const ExperimentConfig& config) {
  const auto s = setup(config);
  Report r;
  r.experiment = "big_jump";
  r.inputs = detail::config_inputs(config);
  const std::string anchor = experiment_table()[6].anchor;
  const auto ens = drift_ensemble(config, s, false);
  const double bt = s.beta * s.t;

  std::vector<double> jtime, jsize;
  std::size_t single = 0, conditioned = 0;
  for (const auto& e : ens.excursions) {
    if (!(e.lifetime > s.t)) continue;
    ++conditioned;
    if (big_jump_count(e, bt, e.lifetime) == 1) ++single;
    if (const auto j = largest_jump(e)) {
      jtime.push_back(j->time);
      jsize.push_back(j->size / s.t);
    }
  }
  const std::size_t min_n = config.param_count("min_conditioned", 2000);
  if (conditioned < min_n) {
    throw InsufficientDataError("big_jump: too few excursions with zeta > t", conditioned);
  }

  const EmpiricalDistribution sizes(jsize);
  const std::size_t k = config.param_count("hill_k", jsize.size() / 2);
  const auto hill = hill_estimator(sizes, k);
  const double ks_pareto = ks_vs_cdf(sizes, [&](double x) { return pareto_limit_cdf(x, s.beta, s.theta); });

  // jump-time draws; normalized by observed time, so sub-delta excursions are accounted for
  const auto sampler = make_T_sampler(ens, true);
  const double unresolved = 1.0 - std::accumulate(ens.lifetime_sample.begin(), ens.lifetime_sample.end(), 0.0) /
                                      ens.lifetime_sample_horizon;
  std::vector<double> tdraws;
  {
    RngStream rng(config.seed, 0, 3 * kBlock);
    const std::size_t m = config.param_count("t_draws", 20 * jtime.size());
    tdraws.reserve(m);
    for (std::size_t i = 0; i < m; ++i) tdraws.push_back(sampler.sample(rng));
  }
  // both laws are only resolved down to delta; compare max(., delta)
  const double ks_time = ks_two_sample(EmpiricalDistribution(censor_below(jtime, ens.delta)),
                                       EmpiricalDistribution(censor_below(tdraws, ens.delta)));
  const double ks_time_raw = ks_two_sample(EmpiricalDistribution(jtime), EmpiricalDistribution(tdraws));
  const double corr = pearson_correlation(jtime, jsize);
  const double single_frac = static_cast<double>(single) / static_cast<double>(conditioned);

  const double ks_tol = config.param("ks_tolerance", 0.08);
  Criterion c1 = Criterion::band("hill_theta", "Hill estimate of the tail index of the big jump / t",
                                 "theta", anchor, hill.value, s.theta - 0.15, s.theta + 0.15);
  c1.detail = {{"ci_lo", hill.ci_lo}, {"ci_hi", hill.ci_hi}, {"k", k}, {"n", jsize.size()}};
  r.criteria.push_back(std::move(c1));
  r.criteria.push_back(Criterion::band("jump_size_ks", "KS of big jump / t against the Pareto limit",
                                       "pareto_limit_cdf(x; beta, theta)", anchor, ks_pareto, 0.0, ks_tol));
  r.criteria.push_back(Criterion::band("jump_time_ks", "KS of max(J, delta) against max(T, delta), T from the lifetime sample",
                                       "sample_T", anchor, ks_time, 0.0, ks_tol));
  r.criteria.push_back(Criterion::band("independence", "|correlation(J, jump size)|", "0 in the limit", anchor,
                                       std::abs(corr), 0.0, config.param("max_correlation", 0.1)));
  r.criteria.push_back(Criterion::band("single_big_jump", "fraction with exactly one jump > beta t",
                                       "1 in the limit", anchor, single_frac,
                                       config.param("min_single_fraction", 0.9), 1.0));
  r.criteria.push_back(Criterion::band("conditioned_count", "excursions with zeta > t", "at least min_conditioned",
                                       anchor, static_cast<double>(conditioned), static_cast<double>(min_n), 1e300));

  r.estimates = {{"hill_theta", hill.value},
                 {"hill_k", k},
                 {"ks_pareto", ks_pareto},
                 {"ks_jump_time", ks_time},
                 {"ks_jump_time_uncensored", ks_time_raw},
                 {"correlation", corr},
                 {"single_big_jump_fraction", single_frac},
                 {"conditioned", conditioned},
                 {"mean_jump_time", sample_mean(jtime)},
                 {"mean_T_draw", sample_mean(tdraws)},
                 {"unresolved_time_fraction", unresolved},
                 {"nu_bar_beta_t", s.nu_bar_bt},
                 {"ensemble", ensemble_facts(ens)}};
  r.tables["jump_size_ecdf"] = detail::ecdf_vs_cdf_table(jsize, [&](double x) { return pareto_limit_cdf(x, s.beta, s.theta); });
  r.tables["jump_time_ecdf"] = detail::ecdf_pair_table(jtime, tdraws);
  r.tables["jump_time_qq"] = detail::qq_table(jtime, tdraws);
  CsvTable pairs{{"J", "jump_over_t"}, {}};
  for (std::size_t i = 0; i < jtime.size(); ++i) pairs.add({jtime[i], jsize[i]});
  r.tables["jump_pairs"] = std::move(pairs);
  return r;
}

Report run_drift_profile(const ExperimentConfig& config) {
  const auto s = setup(config);
  Report r;
  r.experiment = "drift_profile";
  r.inputs = detail::config_inputs(config);
  const std::string anchor = experiment_table()[7].anchor;
  const auto ens = drift_ensemble(config, s, true);
  const double s_lo = config.param("s_low", 0.1);
  const double pre_tol = config.param("pre_jump_tolerance", 0.05);

  std::vector<double> slopes;
  std::size_t quiet = 0, profiles = 0;
  CsvTable mean_profile{{"s", "mean_scaled_value", "limit_mean"}, {}};
  const std::vector<double> s_grid = [] {
    std::vector<double> g;
    for (int i = 1; i <= 40; ++i) g.push_back(0.05 * i);
    return g;
  }();
  std::vector<double> profile_sum(s_grid.size(), 0.0);
  std::vector<double> p_over_t;
  for (const auto& e : ens.excursions) {
    if (!(e.lifetime > s.t) || !e.has_values()) continue;
    const auto j = largest_jump(e);
    if (!j) continue;
    ++profiles;
    const double p = j->size / s.t;
    p_over_t.push_back(p);
    const double s_hi = 0.9 * std::min(1.0, p / s.beta);
    std::vector<double> xs, ys;
    double pre_sup = 0.0;
    for (std::size_t i = 0; i < e.times.size(); ++i) {
      const double u = e.times[i] / s.t;
      const double y = e.values[i] / s.t;
      if (e.times[i] < j->time) pre_sup = std::max(pre_sup, std::abs(y));
      if (u >= s_lo && u <= s_hi) {
        xs.push_back(u);
        ys.push_back(y);
      }
    }
    if (pre_sup <= pre_tol) ++quiet;
    if (xs.size() >= 10 && s_hi > s_lo) slopes.push_back(slope_fit(xs, ys, {s_lo, s_hi}).slope);
    for (std::size_t k = 0; k < s_grid.size(); ++k) profile_sum[k] += e.value_at(s_grid[k] * s.t) / s.t;
  }
  const std::size_t min_n = config.param_count("min_profiles", 500);
  if (slopes.size() < min_n) throw InsufficientDataError("drift_profile: too few conditioned profiles", slopes.size());
  const double mean_slope = sample_mean(slopes);
  const double se = std::sqrt(sample_variance(slopes) / static_cast<double>(slopes.size()));
  const double quiet_frac = static_cast<double>(quiet) / static_cast<double>(profiles);

  // E[(P - beta u)^+] under the Pareto limit
  auto limit_mean = [&](double u) {
    const double b = s.beta * u;
    const double th = s.theta;
    if (b <= s.beta) return s.beta * th / (th - 1.0) - b;
    return s.beta / (th - 1.0) * std::pow(b / s.beta, 1.0 - th);
  };
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    mean_profile.add({s_grid[k], profile_sum[k] / static_cast<double>(profiles), limit_mean(s_grid[k])});
  }

  const double rel = config.param("slope_tolerance", 0.1);
  Criterion c1 = Criterion::band("post_jump_slope", "mean OLS slope of epsilon_ts/t after the big jump",
                                 "-beta", anchor, mean_slope, -s.beta * (1 + rel), -s.beta * (1 - rel));
  c1.detail = {{"ci_lo", mean_slope - 1.96 * se}, {"ci_hi", mean_slope + 1.96 * se}, {"n", slopes.size()}};
  r.criteria.push_back(std::move(c1));
  r.criteria.push_back(Criterion::band("pre_jump_quiet",
                                       fmt::format("fraction with sup |epsilon_ts/t| <= {} before the jump", pre_tol),
                                       "1 in probability", "in probability as t→∞", quiet_frac,
                                       config.param("min_quiet_fraction", 0.9), 1.0));
  r.criteria.push_back(Criterion::band("profile_count", "conditioned profiles with a slope fit",
                                       "at least min_profiles", anchor, static_cast<double>(slopes.size()),
                                       static_cast<double>(min_n), 1e300));
  r.estimates = {{"mean_slope", mean_slope},
                 {"slope_se", se},
                 {"pre_jump_quiet_fraction", quiet_frac},
                 {"profiles", profiles},
                 {"ensemble", ensemble_facts(ens)}};
  r.tables["mean_profile"] = std::move(mean_profile);
  CsvTable sl{{"slope"}, {}};
  for (double v : slopes) sl.add({v});
  r.tables["slopes"] = std::move(sl);
  return r;
}

Report run_conditioned_start(const ExperimentConfig& config) {
  const auto s = setup(config);
  Report r;
  r.experiment = "conditioned_start";
  r.inputs = detail::config_inputs(config);
  const std::string anchor = experiment_table()[8].anchor;
  const double x = config.thresholds.x0;
  const std::uint32_t shards = config.shards;
  const std::size_t n = config.param_count("conditioned_samples", 2000);

  ConditionedOptions opt;
  opt.dt = config.budget.dt;
  opt.acceptance_floor = config.param("acceptance_floor", 1e-5);
  auto parts = run_shards(shards, [&](std::uint32_t shard) {
    std::vector<std::pair<double, double>> out;
    std::pair<std::size_t, std::size_t> counts;
    RngStream rng(config.seed, shard, 4 * kBlock);
    ConditionedStartSampler sampler(*config.model, x, s.t, 0.0, opt);
    for (std::size_t i = shard; i < n; i += shards) {
      const Path p = sampler.next(rng);
      if (const auto j = largest_jump_in_path(p, s.t)) out.push_back(*j);
    }
    counts = {sampler.trials(), sampler.accepted()};
    return std::make_pair(out, counts);
  });
  std::vector<double> jtime, jsize;
  std::size_t trials = 0, accepted = 0;
  for (auto& [v, counts] : parts) {
    for (const auto& [time, size] : v) {
      jtime.push_back(time);
      jsize.push_back(size / s.t);
    }
    trials += counts.first;
    accepted += counts.second;
  }

  FirstPassageOptions fpo;
  fpo.dt = config.budget.dt;
  fpo.cap = config.param("tau_cap", 1e4);
  fpo.shards = shards;
  fpo.seed = config.seed ^ 0x7a7aULL;
  const std::vector<double> grid = {0.5 * s.t, s.t, 2.0 * s.t};
  const auto tx = sample_T_x(*config.model, x, grid, config.param_count("first_passages", 50000), fpo);
  std::vector<double> tdraws;
  {
    RngStream rng(config.seed, 0, 5 * kBlock);
    const std::size_t m = config.param_count("t_draws", 20 * jtime.size());
    for (std::size_t i = 0; i < m; ++i) tdraws.push_back(tx.sample(rng));
  }
  const double ks_time = ks_two_sample(EmpiricalDistribution(jtime), EmpiricalDistribution(tdraws));

  // n(zeta) in the local-time normalization from a natural run
  NaturalRunConfig nat;
  nat.horizon = config.budget.horizon;
  nat.window_end = config.effective_window_end();
  nat.dt = config.budget.dt;
  nat.replicas = config.budget.replicas;
  nat.shards = shards;
  nat.seed = config.seed;
  nat.model_class = ModelClass::negative_drift;
  nat.decompose.zero_tol = config.effective_zero_tol();
  nat.decompose.min_lifetime = config.effective_delta();
  nat.decompose.keep_min_lifetime = std::numeric_limits<double>::infinity();
  const auto ens = collect_natural_ensemble(*config.model, nat);
  const auto nz = estimate_n_zeta(ens, 1);
  const double predicted = nz.per_local_time * x;
  const double rel_dev = tx.mean_tau / predicted - 1.0;

  r.criteria.push_back(Criterion::band("jump_time_ks",
                                       fmt::format("KS of the big-jump time under P_x(.|tau > t), x={}, t={}", x, s.t),
                                       "sample_T_x draws", anchor, ks_time, 0.0, config.param("ks_tolerance", 0.08)));
  Criterion c2 = Criterion::band("mean_first_passage", "E_x[tau_0^-] / (n(zeta) x) - 1",
                                 "E_x[tau_0^-] = n(zeta) x for spectrally positive X", anchor, rel_dev,
                                 -config.param("mean_tolerance", 0.1), config.param("mean_tolerance", 0.1));
  c2.detail = {{"mean_tau", tx.mean_tau}, {"mean_tau_se", tx.mean_tau_se}, {"n_zeta", nz.per_local_time},
               {"x_over_beta", x / s.beta}, {"censored_frac", tx.censored_frac}};
  r.criteria.push_back(std::move(c2));

  r.estimates = {{"ks_jump_time", ks_time},
                 {"acceptance_rate", static_cast<double>(accepted) / static_cast<double>(trials)},
                 {"accepted", accepted},
                 {"mean_tau", tx.mean_tau},
                 {"mean_tau_se", tx.mean_tau_se},
                 {"n_zeta_per_local_time", nz.per_local_time},
                 {"n_zeta_oracle", 1.0 / s.beta},
                 {"detected_time_fraction",
                  static_cast<double>(nz.n_uncensored) * nz.mean_lifetime / ens.horizon_total},
                 {"T_x_cdf_grid", grid},
                 {"T_x_cdf", tx.cdf_on_grid},
                 {"mean_jump_size_over_t", jsize.empty() ? 0.0 : sample_mean(jsize)}};
  r.tables["jump_time_ecdf"] = detail::ecdf_pair_table(jtime, tdraws);
  r.tables["jump_time_qq"] = detail::qq_table(jtime, tdraws);
  return r;
}

}  // namespace lexc
