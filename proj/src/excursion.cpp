#include "lexc/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "lexc/errors.hpp"

namespace lexc {

double Excursion::value_at(double s) const {
  if (values.empty()) throw ContractViolation("Excursion::value_at: values were not stored");
  if (s < 0.0) return 0.0;
  if (!censored() && s >= lifetime) return 0.0;
  const auto it = std::upper_bound(times.begin(), times.end(), s);
  const auto idx = static_cast<std::size_t>(std::distance(times.begin(), it));
  return idx == 0 ? values.front() : values[idx - 1];
}

void ExcursionEnsemble::merge(ExcursionEnsemble other) {
  if (excursions.empty()) {
    excursions = std::move(other.excursions);
  } else {
    excursions.insert(excursions.end(), std::make_move_iterator(other.excursions.begin()),
                      std::make_move_iterator(other.excursions.end()));
  }
  tally.merge(other.tally);
  lifetime_sample.insert(lifetime_sample.end(), other.lifetime_sample.begin(),
                         other.lifetime_sample.end());
  horizon_total += other.horizon_total;
  lifetime_sample_horizon += other.lifetime_sample_horizon;
  local_time_total += other.local_time_total;
  paths += other.paths;
  if (model_tag.empty()) model_tag = other.model_tag;
  if (model_class == ModelClass::unknown) model_class = other.model_class;
  delta = std::max(delta, other.delta);
  zero_tol = std::max(zero_tol, other.zero_tol);
}

std::vector<double> running_infimum(const Path& path) {
  std::vector<double> inf(path.size());
  std::size_t next_jump = 0;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.size(); ++i) {
    double left = path.values[i];
    if (next_jump < path.jumps.size() && path.jumps[next_jump].index == i) {
      left -= path.jumps[next_jump++].size;
    }
    m = std::min({m, left, path.values[i]});
    inf[i] = m;
  }
  return inf;
}

std::vector<double> running_supremum(const Path& path) {
  std::vector<double> sup(path.size());
  std::size_t next_jump = 0;
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.size(); ++i) {
    double left = path.values[i];
    if (next_jump < path.jumps.size() && path.jumps[next_jump].index == i) {
      left -= path.jumps[next_jump++].size;
    }
    m = std::max({m, left, path.values[i]});
    sup[i] = m;
  }
  return sup;
}

PathStats path_stats(const Path& path) { return {running_infimum(path), running_supremum(path)}; }

double default_zero_tol(const ProcessSpec& spec, double dt) {
  if (const auto* s = std::get_if<StableParams>(&spec)) {
    return 2.0 * std::pow(s->scale() * dt, 1.0 / s->alpha());
  }
  const auto& m = std::get<LevyModel>(spec);
  const double diffusive = m.sigma() * std::sqrt(dt);
  const double drift = std::abs(m.beta_drift()) * dt;
  return 2.0 * std::max(diffusive, drift);
}

namespace {

struct RunBuilder {
  const Path& path;
  const DecomposeOptions& opt;
  ExcursionEnsemble& out;

  void emit(std::size_t a, std::size_t b, bool closed, double inf_level,
            std::size_t first_jump) const {
    const auto& t = path.times;
    const double start = 0.5 * (t[a - 1] + t[a]);
    if (!(start < opt.window_end)) return;
    if (!closed && !opt.keep_censored) return;
    const double end = closed ? 0.5 * (t[b] + t[b + 1]) : t[b];
    const double lifetime = end - start;
    if (lifetime < opt.min_lifetime) return;
    if (closed) {
      out.tally.add(lifetime);
      if (opt.record_lifetimes) out.lifetime_sample.push_back(lifetime);
    }
    double height = 0.0;
    for (std::size_t i = a; i <= b; ++i) height = std::max(height, path.values[i] - inf_level);
    if (lifetime < opt.keep_min_lifetime && height < opt.keep_min_height) return;

    Excursion exc;
    exc.start_time = start;
    exc.lifetime = lifetime;
    exc.end = closed ? EndFlag::closed : EndFlag::censored;
    exc.height = height;
    if (lifetime >= opt.store_values_min_lifetime) {
      const std::size_t n = b - a + 3;
      exc.times.reserve(n);
      exc.values.reserve(n);
      exc.times.push_back(0.0);
      exc.values.push_back(0.0);
      for (std::size_t i = a; i <= b; ++i) {
        exc.times.push_back(t[i] - start);
        exc.values.push_back(path.values[i] - inf_level);
      }
      if (closed) {
        exc.times.push_back(lifetime);
        exc.values.push_back(0.0);
      }
    }
    for (double p : opt.probe_times) {
      double value = std::numeric_limits<double>::quiet_NaN();
      if (p < lifetime) {
        const auto first = t.begin() + static_cast<long>(a);
        const auto stop = t.begin() + static_cast<long>(b + 1);
        const auto it = std::upper_bound(first, stop, start + p);
        value = it == first ? 0.0 : path.values[static_cast<std::size_t>(it - t.begin()) - 1] - inf_level;
      }
      exc.probes.push_back(value);
    }
    const std::size_t last = closed ? b + 1 : b;
    for (std::size_t j = first_jump; j < path.jumps.size() && path.jumps[j].index <= last; ++j) {
      if (path.jumps[j].index < a) continue;
      if (path.jumps[j].index > b && path.jumps[j].size > 0.0) continue;  // opens the next run
      exc.jumps.push_back({std::min(t[path.jumps[j].index] - start, lifetime), path.jumps[j].size});
    }
    out.excursions.push_back(std::move(exc));
  }
};

}  // namespace

ExcursionEnsemble decompose_excursions(const Path& path, const DecomposeOptions& options) {
  if (options.zero_tol < 0.0) throw ContractViolation("decompose_excursions: zero_tol must be >= 0");
  ExcursionEnsemble ens;
  ens.delta = options.min_lifetime;
  ens.zero_tol = options.zero_tol;
  if (path.empty()) return ens;
  ens.paths = 1;

  RunBuilder builder{path, options, ens};
  const auto& t = path.times;
  const auto& v = path.values;
  std::size_t next_jump = 0;
  double inf = v[0];
  double inf_at_window = v[0];
  bool in_run = false;
  std::size_t run_start = 0;
  std::size_t run_first_jump = 0;
  double run_level = inf;

  for (std::size_t i = 0; i < path.size(); ++i) {
    double left = v[i];
    const std::size_t jump_here = next_jump;
    if (next_jump < path.jumps.size() && path.jumps[next_jump].index == i) {
      left -= path.jumps[next_jump++].size;
    }
    inf = std::min({inf, left, v[i]});
    if (t[i] <= options.window_end) inf_at_window = inf;
    const bool positive = v[i] - inf > options.zero_tol;
    // left limit at a new infimum, then a jump up: the reflected path hit 0 in between
    if (positive && in_run && left - inf <= options.zero_tol && inf < run_level) {
      builder.emit(run_start, i - 1, true, run_level, run_first_jump);
      in_run = false;
    }
    if (positive && !in_run) {
      in_run = true;
      run_start = i;
      run_first_jump = jump_here;
      run_level = inf;
    } else if (!positive && in_run) {
      in_run = false;
      builder.emit(run_start, i - 1, true, run_level, run_first_jump);
    }
  }
  if (in_run) builder.emit(run_start, path.size() - 1, false, run_level, run_first_jump);

  ens.horizon_total = std::min(options.window_end, path.horizon());
  if (options.record_lifetimes) ens.lifetime_sample_horizon = ens.horizon_total;
  ens.local_time_total = v[0] - inf_at_window;
  return ens;
}

ExcursionEnsemble decompose_excursions(const Path& path, double zero_tol, double min_lifetime) {
  DecomposeOptions opt;
  opt.zero_tol = zero_tol;
  opt.min_lifetime = min_lifetime;
  return decompose_excursions(path, opt);
}

std::optional<ExcursionJump> first_big_jump(const Excursion& exc, double threshold) {
  if (!(threshold > 0.0)) throw DomainError("first_big_jump: threshold must be > 0");
  for (const auto& j : exc.jumps) {
    if (j.time > exc.lifetime) break;
    if (j.size > threshold) return j;
  }
  return std::nullopt;
}

std::size_t big_jump_count(const Excursion& exc, double threshold, double up_to) {
  if (!(threshold > 0.0)) throw DomainError("big_jump_count: threshold must be > 0");
  if (up_to < 0.0) throw DomainError("big_jump_count: t must be >= 0");
  const double limit = std::min(up_to, exc.lifetime);
  std::size_t count = 0;
  for (const auto& j : exc.jumps) {
    if (j.time > 0.0 && j.time <= limit && j.size > threshold) ++count;
  }
  return count;
}

double last_passage_at_infimum(const Path& path, double t, double zero_tol) {
  if (path.empty()) throw DomainError("last_passage_at_infimum: empty path");
  if (t < 0.0 || t > path.horizon()) throw DomainError("last_passage_at_infimum: t outside horizon");
  const auto end = std::upper_bound(path.times.begin(), path.times.end(), t);
  const auto last = static_cast<std::size_t>(std::distance(path.times.begin(), end)) - 1;
  const std::vector<double> left = left_limits(path);
  double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= last; ++i) inf = std::min({inf, left[i], path.values[i]});
  for (std::size_t i = last + 1; i-- > 0;) {
    if (std::abs(path.values[i] - inf) <= zero_tol || std::abs(left[i] - inf) <= zero_tol) {
      return path.times[i];
    }
  }
  return 0.0;
}

void write_ensemble_csv(const ExcursionEnsemble& ens, double jump_threshold, std::ostream& os,
                        const std::string& extra_column, const std::string& extra_value) {
  os << "shard,replica,start,lifetime,height,J_time,J_size,censored";
  if (!extra_column.empty()) os << ',' << extra_column;
  os << '\n';
  for (const auto& e : ens.excursions) {
    os << fmt::format("{},{},{:.17g},{:.17g},{:.17g},", e.shard, e.replica, e.start_time,
                      e.lifetime, e.height);
    const auto jump = jump_threshold > 0.0 ? first_big_jump(e, jump_threshold) : std::nullopt;
    if (jump) {
      os << fmt::format("{:.17g},{:.17g}", jump->time, jump->size);
    } else {
      os << ',';
    }
    os << ',' << (e.censored() ? 1 : 0);
    if (!extra_column.empty()) os << ',' << extra_value;
    os << '\n';
  }
}

}  // namespace lexc
