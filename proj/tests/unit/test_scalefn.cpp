#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "lexc/errors.hpp"
#include "lexc/scalefn.hpp"

using namespace lexc;

namespace {

// partial fractions of 1/psi for drift beta, exponential jumps (rate r, mean m)
double cl_scale(double x, double beta, double r, double m) {
  const double c = (beta + r * m) * m;
  return 1.0 / beta + (m / c - 1.0 / beta) * std::exp(-beta * x / c);
}

double bm_scale(double x, double beta, double sigma) {
  return (1.0 - std::exp(-2.0 * beta * x / (sigma * sigma))) / beta;
}

}  // namespace

TEST_CASE("Stehfest weights") {
  CHECK(stehfest_weights(2) == std::vector<double>{2.0, -2.0});
  const auto w4 = stehfest_weights(4);
  REQUIRE(w4.size() == 4);
  CHECK(w4[0] == doctest::Approx(-2.0));
  CHECK(w4[1] == doctest::Approx(26.0));
  CHECK(w4[2] == doctest::Approx(-48.0));
  CHECK(w4[3] == doctest::Approx(24.0));
  for (int n : {6, 10, 14}) {
    const auto w = stehfest_weights(n);
    // inverting F = 1/s must give 1: sum V_k / k = 1
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += w[k - 1] / k;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(0.0).epsilon(1e-6));
  }
  CHECK_THROWS_AS(stehfest_weights(5), DomainError);
  CHECK_THROWS_AS(stehfest_weights(0), DomainError);
}

TEST_CASE("Gaver-Stehfest on textbook transforms") {
  for (double x : {0.3, 1.0, 4.0}) {
    CHECK(gaver_stehfest([](double s) { return 1.0 / (s * s); }, x) == doctest::Approx(x).epsilon(1e-6));
    CHECK(gaver_stehfest([](double s) { return 1.0 / (s + 1.0); }, x, 16) ==
          doctest::Approx(std::exp(-x)).epsilon(1e-3));
  }
}

TEST_CASE("Laplace exponents") {
  const LevyModel bm(0.7, 1.3, JumpLaw::none());
  CHECK(laplace_exponent(bm, 2.0) == doctest::Approx(0.7 * 2.0 + 0.5 * 1.69 * 4.0));
  const LevyModel cl(1.0, 0.0, JumpLaw::exponential(0.8, 0.5));
  const double lam = 1.7;
  CHECK(laplace_exponent(cl, lam) ==
        doctest::Approx(lam + 0.8 * (1.0 / (1.0 + lam * 0.5) - 1.0 + lam * 0.5)));
  CHECK(laplace_exponent(StableParams::spectrally_positive_with_alpha(1.5), 4.0) == doctest::Approx(8.0));
  // Pareto jumps go through quadrature; psi is convex with psi'(0) = beta
  const LevyModel par(1.0, 0.1, JumpLaw::pareto(1.0, 0.5, 2.5));
  const double h = 1e-4;
  CHECK(laplace_exponent(par, h) / h == doctest::Approx(1.0).epsilon(1e-3));
  const double a = laplace_exponent(par, 1.0), b = laplace_exponent(par, 2.0), c = laplace_exponent(par, 3.0);
  CHECK(a - 2.0 * b + c > 0.0);
}

TEST_CASE("scale functions against closed forms") {
  const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

  const LevyModel bm(1.0, 1.0, JumpLaw::none());
  const auto tb = scale_function(bm, grid, {14, true, false});
  CHECK_FALSE(tb.closed_form);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(tb.w[i] == doctest::Approx(bm_scale(grid[i], 1.0, 1.0)).epsilon(1e-4));
  }

  const LevyModel cl(1.0, 0.0, JumpLaw::exponential(0.8, 0.5));
  // 50-digit inversion at order 24; error grows with x, about 5e-8 at x = 8
  const auto tc = scale_function(cl, grid, {24, true, true});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(tc.w[i] == doctest::Approx(cl_scale(grid[i], 1.0, 0.8, 0.5)).epsilon(1e-7));
  }

  const auto sp = StableParams::spectrally_positive_with_alpha(1.5);
  const auto ts = scale_function(sp, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(ts.w[i] == doctest::Approx(std::sqrt(grid[i]) / std::tgamma(1.5)).epsilon(1e-12));
  }
  std::vector<double> fine;
  for (int i = 0; i <= 150; ++i) fine.push_back(0.5 + 0.05 * i);
  const auto tf = scale_function(sp, fine);
  for (std::size_t i = 2; i + 2 < fine.size(); ++i) CHECK(tf.log_slope[i] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(std::isnan(tf.log_slope[1]));
  CHECK(std::isnan(tf.log_slope.back()));
}

TEST_CASE("height tail from W") {
  std::vector<double> x, w;
  for (int i = 1; i <= 400; ++i) {
    x.push_back(i * 0.01);
    w.push_back(bm_scale(x.back(), 1.0, 1.0));
  }
  const auto table = make_scale_table(x, w);
  for (double at : {0.5, 1.0, 2.5}) {
    const double e = std::exp(-2.0 * at);
    CHECK(height_tail_from_W(table, at) == doctest::Approx(2.0 * e / (1.0 - e)).epsilon(1e-6));
  }
  CHECK_THROWS(height_tail_from_W(table, 0.01));
  CHECK_THROWS(make_scale_table({1.0, 0.5}, {1.0, 2.0}));
}

TEST_CASE("option validation") {
  const std::vector<double> grid{1.0, 2.0};
  const LevyModel par(1.0, 0.1, JumpLaw::pareto(1.0, 0.5, 2.5));
  CHECK_FALSE(has_closed_form_exponent(par));
  CHECK(has_closed_form_exponent(LevyModel(1.0, 1.0, JumpLaw::none())));
  CHECK(has_closed_form_exponent(StableParams::spectrally_positive_with_alpha(1.7)));
  CHECK_THROWS_AS(scale_function(par, grid, {14, true, true}), UnsupportedError);
  CHECK_THROWS_AS(scale_function(LevyModel(1.0, 1.0, JumpLaw::none()), grid, {13, true, false}), DomainError);
}

TEST_CASE("scale CSV layout") {
  const auto t = scale_function(StableParams::spectrally_positive_with_alpha(1.5), std::vector<double>{1, 2, 3});
  std::ostringstream os;
  write_scale_csv(t, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("x,W,log_slope,height_tail\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
