#include "lexc/pathsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "lexc/errors.hpp"

namespace lexc {

void Path::clear() {
  times.clear();
  values.clear();
  jumps.clear();
}

std::vector<double> left_limits(const Path& path) {
  std::vector<double> left = path.values;
  for (const auto& j : path.jumps) left[j.index] -= j.size;
  return left;
}

Path negated(const Path& path) {
  Path out = path;
  out.origin = -path.origin;
  for (auto& v : out.values) v = -v;
  for (auto& j : out.jumps) j.size = -j.size;
  return out;
}

double sample_stable(double alpha, double skew, RngStream& rng) {
  const double pi = std::numbers::pi;
  const double v = pi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  if (alpha == 1.0) return std::tan(v);
  const double t = skew * std::tan(pi * alpha / 2.0);
  const double b = std::atan(t) / alpha;
  const double s = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
  const double avb = alpha * (v + b);
  return s * std::sin(avb) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos(v - avb) / w, (1.0 - alpha) / alpha);
}

PathStepper::PathStepper(const ProcessSpec& spec, const SimOptions& options, double x0,
                         RngStream& rng, double horizon)
    : spec_(&spec), rng_(&rng), dt_(options.dt), horizon_(horizon), x_(x0), left_(x0) {
  if (!(options.dt > 0.0) || !std::isfinite(options.dt)) throw ConfigError("dt must be > 0");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");

  if (const auto* stable = std::get_if<StableParams>(&spec)) {
    stable_ = true;
    alpha_ = stable->alpha();
    skew_ = stable->skew();
    stable_scale_ = stable->scale();
    step_scale_ = std::pow(stable_scale_ * dt_, 1.0 / alpha_);
    return;
  }

  const auto& model = std::get<LevyModel>(spec);
  const JumpLaw& jumps = model.jumps();
  if (jumps.kind() == JumpKind::stable_jumps) {
    throw UsageError("stable jump laws are simulated with simulate_stable_path");
  }
  variance_ = model.sigma() * model.sigma();
  drift_ = -model.beta_drift();
  if (jumps.kind() != JumpKind::none) {
    const double jump_scale =
        jumps.kind() == JumpKind::compound_pareto ? jumps.scale() : jumps.mean_size();
    cutoff_ = options.jump_cutoff >= 0.0 ? options.jump_cutoff : std::sqrt(dt_) * jump_scale;
    const double sign_bias = 2.0 * jumps.positive_fraction() - 1.0;
    const double big_abs_mean = jumps.abs_moment1() - jumps.truncated_abs_moment1(cutoff_);
    drift_ -= sign_bias * jumps.rate() * big_abs_mean;
    variance_ += jumps.rate() * jumps.truncated_abs_moment2(cutoff_);
    big_rate_ = cutoff_ > 0.0 ? jumps.magnitude_tail(cutoff_) : jumps.rate();
    if (big_rate_ > 0.0) next_jump_ = rng_->exponential() / big_rate_;
  }
  sd_ = std::sqrt(variance_);
}

double PathStepper::sample_jump() {
  const JumpLaw& jumps = std::get<LevyModel>(*spec_).jumps();
  double magnitude = 0.0;
  if (jumps.kind() == JumpKind::compound_pareto) {
    const double lower = std::max(cutoff_, jumps.scale());
    magnitude = lower * std::pow(rng_->uniform(), -1.0 / jumps.theta());
  } else {
    magnitude = std::max(cutoff_, 0.0) + jumps.mean_size() * rng_->exponential();
  }
  if (jumps.side() == JumpSide::two_sided && rng_->uniform() >= jumps.positive_fraction()) {
    return -magnitude;
  }
  return magnitude;
}

void PathStepper::begin(Path& path) const {
  path.clear();
  path.origin = x_;
  path.times.push_back(t_);
  path.values.push_back(x_);
}

bool PathStepper::advance() {
  if (t_ >= horizon_) return false;
  double t_grid = static_cast<double>(k_ + 1) * dt_;
  if (t_grid > horizon_) t_grid = horizon_;
  const bool is_jump = next_jump_ < t_grid;
  const double t_new = is_jump ? next_jump_ : t_grid;
  const double dt = t_new - t_;

  if (stable_) {
    const double scale = dt == dt_ ? step_scale_ : std::pow(stable_scale_ * dt, 1.0 / alpha_);
    x_ += scale * sample_stable(alpha_, skew_, *rng_);
  } else {
    x_ += drift_ * dt;
    if (sd_ > 0.0) x_ += sd_ * std::sqrt(dt) * rng_->normal();
  }
  left_ = x_;
  last_jump_ = 0.0;
  if (is_jump) {
    last_jump_ = sample_jump();
    x_ += last_jump_;
    next_jump_ += rng_->exponential() / big_rate_;
  } else {
    ++k_;
  }
  t_ = t_new;
  return true;
}

bool PathStepper::step(Path& path) {
  if (!advance()) return false;
  path.times.push_back(t_);
  if (last_jump_ != 0.0) path.jumps.push_back({path.values.size(), last_jump_});
  path.values.push_back(x_);
  return true;
}

Path simulate_path(const LevyModel& model, double horizon, double dt, double x0, RngStream& rng,
                   double jump_cutoff) {
  if (!(dt > 0.0)) throw ConfigError("simulate_path: dt must be > 0");
  if (!(horizon > 0.0)) throw ConfigError("simulate_path: horizon must be > 0");
  if (dt > horizon) throw ConfigError("simulate_path: dt must not exceed the horizon");
  if (model.jumps().kind() == JumpKind::stable_jumps) {
    throw UsageError("simulate_path: stable jump laws go through simulate_stable_path");
  }
  const ProcessSpec spec = model;
  PathStepper stepper(spec, SimOptions{dt, jump_cutoff}, x0, rng, horizon);
  Path path;
  const auto expected = static_cast<std::size_t>(horizon / dt) + 2;
  path.times.reserve(expected);
  path.values.reserve(expected);
  stepper.begin(path);
  while (stepper.step(path)) {
  }
  return path;
}

Path simulate_stable_path(const StableParams& params, double horizon, double dt, double x0,
                          RngStream& rng) {
  if (!(dt > 0.0)) throw ConfigError("simulate_stable_path: dt must be > 0");
  if (!(horizon > 0.0)) throw ConfigError("simulate_stable_path: horizon must be > 0");
  const ProcessSpec spec = params;
  PathStepper stepper(spec, SimOptions{dt, -1.0}, x0, rng, horizon);
  Path path;
  const auto expected = static_cast<std::size_t>(horizon / dt) + 2;
  path.times.reserve(expected);
  path.values.reserve(expected);
  stepper.begin(path);
  while (stepper.step(path)) {
  }
  return path;
}

Path simulate(const ProcessSpec& spec, double horizon, double dt, double x0, RngStream& rng) {
  if (const auto* m = std::get_if<LevyModel>(&spec)) return simulate_path(*m, horizon, dt, x0, rng);
  return simulate_stable_path(std::get<StableParams>(spec), horizon, dt, x0, rng);
}

std::optional<double> first_passage_below(const Path& path, double level) {
  std::size_t next_jump = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    double left = path.values[i];
    if (next_jump < path.jumps.size() && path.jumps[next_jump].index == i) {
      left -= path.jumps[next_jump].size;
      ++next_jump;
    }
    if (left < level || path.values[i] < level) return path.times[i];
  }
  return std::nullopt;
}

void write_path_csv(const Path& path, std::ostream& os) {
  os << "time,value,jump_flag,jump_size\n";
  std::size_t next_jump = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    double size = 0.0;
    int flag = 0;
    if (next_jump < path.jumps.size() && path.jumps[next_jump].index == i) {
      size = path.jumps[next_jump].size;
      flag = 1;
      ++next_jump;
    }
    os << fmt::format("{:.17g},{:.17g},{},{:.17g}\n", path.times[i], path.values[i], flag, size);
  }
}

}  // namespace lexc
