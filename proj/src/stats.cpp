#include "lexc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lexc/errors.hpp"

namespace lexc {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
  std::sort(samples_.begin(), samples_.end());
  const double w = samples_.empty() ? 0.0 : 1.0 / static_cast<double>(samples_.size());
  weights_.assign(samples_.size(), w);
  cumulative_.resize(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    cumulative_[i] = static_cast<double>(i + 1) / static_cast<double>(samples_.size());
  }
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples,
                                             std::vector<double> weights) {
  if (samples.size() != weights.size()) throw ContractViolation("samples/weights size mismatch");
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return samples[i] < samples[j]; });
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ContractViolation("EmpiricalDistribution: weights must be > 0");
    total += w;
  }
  samples_.reserve(samples.size());
  weights_.reserve(samples.size());
  for (auto i : order) {
    samples_.push_back(samples[i]);
    weights_.push_back(weights[i] / total);
  }
  cumulative_.resize(samples_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
  if (!cumulative_.empty()) cumulative_.back() = 1.0;
  uniform_ = false;
}

double EmpiricalDistribution::cdf(double x) const {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  if (it == samples_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(std::distance(samples_.begin(), it)) - 1];
}

double EmpiricalDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) m += samples_[i] * weights_[i];
  return m;
}

double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  if (a.empty() || b.empty()) throw InsufficientDataError("ks_two_sample: empty sample", 0);
  const auto& xa = a.samples();
  const auto& xb = b.samples();
  const auto& wa = a.weights();
  const auto& wb = b.weights();
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0, d = 0.0;
  while (i < xa.size() || j < xb.size()) {
    const double x = j >= xb.size() || (i < xa.size() && xa[i] <= xb[j]) ? xa[i] : xb[j];
    while (i < xa.size() && xa[i] == x) fa += wa[i++];
    while (j < xb.size() && xb[j] == x) fb += wb[j++];
    d = std::max(d, std::abs(fa - fb));
  }
  return std::min(d, 1.0);
}

double ks_vs_cdf(const EmpiricalDistribution& a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw InsufficientDataError("ks_vs_cdf: empty sample", 0);
  const auto& x = a.samples();
  const auto& w = a.weights();
  double below = 0.0, d = 0.0, prev_f = -1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    if (!(f >= 0.0 && f <= 1.0) || f < prev_f) {
      throw ContractViolation("ks_vs_cdf: cdf is not monotone in [0, 1] on the samples");
    }
    prev_f = f;
    const double above = below + w[i];
    d = std::max({d, f - below, above - f});
    below = above;
  }
  return d;
}

std::size_t default_hill_k(std::size_t n) {
  return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.6)));
}

Estimate hill_estimator(const EmpiricalDistribution& a, std::size_t k) {
  const std::size_t n = a.size();
  if (k == 0) k = default_hill_k(n);
  if (k < 10) throw InsufficientDataError("hill_estimator: k must be >= 10", k);
  if (k >= n) throw InsufficientDataError("hill_estimator: k must be < n", n);
  const auto& x = a.samples();
  const double threshold = x[n - k - 1];
  if (!(threshold > 0.0)) throw DomainError("hill_estimator: nonpositive samples in the tail");
  double sum = 0.0;
  for (std::size_t i = n - k; i < n; ++i) sum += std::log(x[i] / threshold);
  if (!(sum > 0.0)) throw DomainError("hill_estimator: degenerate tail (all top samples equal)");
  const double theta = static_cast<double>(k) / sum;
  const double half = 1.96 / std::sqrt(static_cast<double>(k));
  return {theta, theta * (1.0 - half), theta * (1.0 + half), k};
}

SlopeFit slope_fit(std::span<const double> times, std::span<const double> values,
                   std::pair<double, double> window) {
  if (times.size() != values.size()) throw ContractViolation("slope_fit: size mismatch");
  double st = 0.0, sv = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window.first || times[i] > window.second) continue;
    st += times[i];
    sv += values[i];
    ++n;
  }
  if (n < 10) throw InsufficientDataError("slope_fit: fewer than 10 points in window", n);
  const double mt = st / static_cast<double>(n);
  const double mv = sv / static_cast<double>(n);
  double stt = 0.0, stv = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window.first || times[i] > window.second) continue;
    stt += (times[i] - mt) * (times[i] - mt);
    stv += (times[i] - mt) * (values[i] - mv);
  }
  if (!(stt > 0.0)) throw DomainError("slope_fit: degenerate (constant) time values");
  SlopeFit fit;
  fit.n = n;
  fit.slope = stv / stt;
  fit.intercept = mv - fit.slope * mt;
  double rss = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window.first || times[i] > window.second) continue;
    const double r = values[i] - fit.intercept - fit.slope * times[i];
    rss += r * r;
  }
  fit.std_error = std::sqrt(rss / static_cast<double>(n - 2) / stt);
  return fit;
}

std::pair<double, double> bootstrap_ci(
    const std::function<double(std::span<const double>)>& statistic,
    std::span<const double> sample, std::size_t resamples, RngStream& rng) {
  if (resamples < 100) throw ConfigError("bootstrap_ci: resamples must be >= 100");
  if (sample.empty()) throw InsufficientDataError("bootstrap_ci: empty sample", 0);
  std::vector<double> stats(resamples);
  std::vector<double> buffer(sample.size());
  const auto n = static_cast<double>(sample.size());
  for (std::size_t r = 0; r < resamples; ++r) {
    for (auto& b : buffer) {
      auto idx = static_cast<std::size_t>(rng.uniform() * n);
      if (idx >= sample.size()) idx = sample.size() - 1;
      b = sample[idx];
    }
    stats[r] = statistic(buffer);
  }
  std::sort(stats.begin(), stats.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(resamples - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, resamples - 1);
    const double frac = pos - static_cast<double>(lo);
    return stats[lo] + frac * (stats[hi] - stats[lo]);
  };
  return {quantile(0.025), quantile(0.975)};
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double sample_mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = sample_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractViolation("pearson_correlation: bad sizes");
  const double mx = sample_mean(x), my = sample_mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace lexc
