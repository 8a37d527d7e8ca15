#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "lexc/rng.hpp"

namespace lexc {

// Sorted sample with positive weights summing to one.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  explicit EmpiricalDistribution(std::vector<double> samples);
  EmpiricalDistribution(std::vector<double> samples, std::vector<double> weights);

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const std::vector<double>& samples() const noexcept { return samples_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  bool uniform_weights() const noexcept { return uniform_; }

  // F(x) = total weight of samples <= x.
  double cdf(double x) const;
  double mean() const;

 private:
  std::vector<double> samples_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  bool uniform_ = true;
};

struct Estimate {
  double value = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n = 0;
};

double ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);
double ks_vs_cdf(const EmpiricalDistribution& a, const std::function<double(double)>& cdf);

// Hill estimator of the tail index from the k largest order statistics.
// k = 0 selects the default floor(n^0.6).
Estimate hill_estimator(const EmpiricalDistribution& a, std::size_t k = 0);
std::size_t default_hill_k(std::size_t n);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// OLS fit restricted to window.first <= time <= window.second.
SlopeFit slope_fit(std::span<const double> times, std::span<const double> values,
                   std::pair<double, double> window);

// Percentile 2.5/97.5 interval over with-replacement resamples.
std::pair<double, double> bootstrap_ci(
    const std::function<double(std::span<const double>)>& statistic,
    std::span<const double> sample, std::size_t resamples, RngStream& rng);

// Wilson 95% score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials,
                                          double z = 1.959963984540054);

double sample_mean(std::span<const double> x);
double sample_variance(std::span<const double> x);
double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace lexc
