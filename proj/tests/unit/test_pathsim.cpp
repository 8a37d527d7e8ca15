#include <cmath>
#include <algorithm>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "lexc/errors.hpp"
#include "lexc/pathsim.hpp"
#include "lexc/stats.hpp"

using namespace lexc;

namespace {

void check_well_formed(const Path& p, double x0, double horizon) {
  REQUIRE(!p.empty());
  CHECK(p.times.front() == 0.0);
  CHECK(p.values.front() == x0);
  CHECK(p.horizon() == doctest::Approx(horizon).epsilon(1e-12));
  for (std::size_t i = 1; i < p.size(); ++i) REQUIRE(p.times[i] > p.times[i - 1]);
  const auto left = left_limits(p);
  for (std::size_t i = 1; i < p.jumps.size(); ++i) REQUIRE(p.jumps[i].index > p.jumps[i - 1].index);
  for (const auto& j : p.jumps) {
    REQUIRE(j.index < p.size());
    CHECK(p.values[j.index] - left[j.index] == doctest::Approx(j.size));
  }
}

}  // namespace

TEST_CASE("Brownian increments have the model mean and variance") {
  const LevyModel m(0.5, 2.0, JumpLaw::none());
  RngStream rng(21, 0);
  const Path p = simulate_path(m, 200.0, 1e-2, 1.0, rng);
  check_well_formed(p, 1.0, 200.0);
  CHECK(p.jumps.empty());
  std::vector<double> inc;
  for (std::size_t i = 1; i < p.size(); ++i) inc.push_back(p.values[i] - p.values[i - 1]);
  CHECK(sample_mean(inc) == doctest::Approx(-0.5e-2).epsilon(0.6));
  CHECK(sample_variance(inc) == doctest::Approx(4.0e-2).epsilon(0.03));
}

TEST_CASE("compensated Pareto model: mean of X_T and jump bookkeeping") {
  const LevyModel m(1.0, 0.05, JumpLaw::pareto(1.2, 0.5, 2.5));
  std::vector<double> end;
  std::size_t big = 0;
  const double T = 5.0;
  for (std::uint32_t r = 0; r < 2000; ++r) {
    RngStream rng(22, 0, r);
    const Path p = simulate_path(m, T, 1e-2, 0.0, rng);
    if (r < 20) check_well_formed(p, 0.0, T);
    end.push_back(p.values.back());
    for (const auto& j : p.jumps) big += j.size >= 1.0;
  }
  // E X_T = -beta T; sd of the mean ~ sqrt(Var X_T / n)
  const double var_t = T * (0.05 * 0.05 + 1.2 * m.jumps().abs_moment2());
  CHECK(std::abs(sample_mean(end) + T) < 4.0 * std::sqrt(var_t / 2000.0));
  // jumps >= 1 arrive at rate nu_bar(1)
  const double expected = nu_bar(m.jumps(), 1.0) * T * 2000.0;
  CHECK(std::abs(static_cast<double>(big) - expected) < 4.0 * std::sqrt(expected));
}

TEST_CASE("spectrally positive stable: E exp(-lambda X_1) = exp(lambda^alpha)") {
  const auto sp = StableParams::spectrally_positive_with_alpha(1.5);
  const int n = 40000;
  for (double lambda : {0.3, 0.7}) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      RngStream rng(23, 0, static_cast<std::uint32_t>(i));
      const Path p = simulate_stable_path(sp, 1.0, 0.25, 0.0, rng);
      const double v = std::exp(-lambda * p.values.back());
      s += v;
      s2 += v * v;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - std::exp(std::pow(lambda, 1.5))) < 4.0 * se);
  }
}

TEST_CASE("symmetric stable variates: characteristic function") {
  RngStream rng(24, 0);
  const int n = 100000;
  for (double alpha : {1.5, 0.8}) {
    double c1 = 0.0, c2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = sample_stable(alpha, 0.0, rng);
      c1 += std::cos(x);
      c2 += std::cos(2.0 * x);
    }
    CHECK(c1 / n == doctest::Approx(std::exp(-1.0)).epsilon(0.02));
    CHECK(c2 / n == doctest::Approx(std::exp(-std::pow(2.0, alpha))).epsilon(0.08));
  }
}

TEST_CASE("stable path scaling: X_t / t^(1/alpha) has the law of X_1") {
  const StableParams s(1.5, 0.5);
  std::vector<double> a, b;
  for (std::uint32_t i = 0; i < 4000; ++i) {
    RngStream r1(25, 0, i), r2(25, 1, i);
    a.push_back(simulate_stable_path(s, 1.0, 1e-2, 0.0, r1).values.back());
    b.push_back(simulate_stable_path(s, 4.0, 1e-2, 0.0, r2).values.back() / s.norming(4.0));
  }
  CHECK(ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(b)) < 0.045);
}

TEST_CASE("simulation is deterministic given the stream") {
  const LevyModel m(1.0, 0.3, JumpLaw::pareto(2.0, 0.1, 1.5));
  RngStream r1(26, 2, 9), r2(26, 2, 9);
  CHECK(simulate(m, 10.0, 1e-2, 0.5, r1) == simulate(m, 10.0, 1e-2, 0.5, r2));
}

TEST_CASE("first passage, negation and CSV output on a hand-made path") {
  Path p;
  p.times = {0.0, 1.0, 1.5, 2.0};
  p.values = {1.0, 0.5, 2.0, -1.0};
  p.jumps = {{2, 1.0}, {3, -2.5}};
  CHECK(first_passage_below(p, 0.6) == doctest::Approx(1.0));
  CHECK(first_passage_below(p, 0.0) == doctest::Approx(2.0));
  CHECK_FALSE(first_passage_below(p, -5.0).has_value());
  const auto left = left_limits(p);
  CHECK(left[2] == doctest::Approx(1.0));
  CHECK(left[3] == doctest::Approx(1.5));

  const Path q = negated(p);
  CHECK(q.values[1] == -0.5);
  CHECK(q.jumps[0].size == -1.0);
  CHECK(negated(q) == p);

  std::ostringstream os;
  write_path_csv(p, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("time,value,jump_flag,jump_size\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find('\r') == std::string::npos);
}
