#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lexc/errors.hpp"
#include "lexc/levy_model.hpp"

using namespace lexc;

namespace {

bool close_rel(double got, double want, double tol = 1e-13) {
  return std::abs(got - want) <= tol * std::abs(want);
}

}  // namespace

// reference values computed with mpmath at 30 digits
TEST_CASE("closed-form tails against high-precision values") {
  CHECK(close_rel(stable_lifetime_tail(4.0, 0.5), 0.5 / std::sqrt(std::numbers::pi)));
  CHECK(close_rel(stable_lifetime_tail(2.0, 2.0 / 3.0), 0.235153034228223012623));
  CHECK(close_rel(stable_lifetime_tail(3.0, 0.25), 0.620063105164983341511));
  CHECK(close_rel(height_lifetime_ratio_constant(1.5), 1.33946926735387381683));
  CHECK(close_rel(height_lifetime_ratio_constant(1.7), 1.50736615214842471494));
  CHECK(close_rel(stable_scale_function(4.0, 1.5), 2.25675833419102514779));
  CHECK(close_rel(stable_scale_function(5.0, 1.7), 3.39537508368376141148));
  CHECK(close_rel(stable_height_tail(2.0, 1.5), 0.25));

  const auto b = brownian_excursion_tails(1.0, 2.0);
  CHECK(close_rel(b.lifetime_tail, std::sqrt(2.0 / std::numbers::pi)));
  CHECK(close_rel(b.height_tail, 0.5));

  CHECK(close_rel(pareto_limit_cdf(2.0, 1.0, 1.5), 1.0 - std::pow(2.0, -1.5)));
  CHECK(pareto_limit_cdf(0.5, 1.0, 1.5) == 0.0);
  CHECK(pareto_limit_cdf(1.0, 1.0, 1.5) == 0.0);
}

TEST_CASE("ratio identity holds at every t") {
  // n(height > t^(1/alpha)) / n(zeta > t) with rho = 1/alpha does not depend on t
  for (double alpha : {1.2, 1.5, 1.8}) {
    const double want = height_lifetime_ratio_constant(alpha);
    for (double t : {0.1, 1.0, 7.0, 1e3}) {
      const double got = stable_height_tail(std::pow(t, 1.0 / alpha), alpha) /
                         stable_lifetime_tail(t, 1.0 / alpha);
      CHECK(close_rel(got, want, 1e-12));
    }
  }
}

TEST_CASE("closed forms reject values outside their domain") {
  CHECK_THROWS_AS(stable_lifetime_tail(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(stable_lifetime_tail(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(stable_height_tail(1.0, 0.9), DomainError);
  CHECK_THROWS_AS(pareto_limit_cdf(2.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(height_lifetime_ratio_constant(1.0), DomainError);
  CHECK_THROWS_AS(nu_bar(JumpLaw::none(), 0.0), DomainError);
}

TEST_CASE("jump law tails and moments") {
  const auto p = JumpLaw::pareto(1.2, 0.02, 1.5);
  CHECK(close_rel(p.mean_size(), 0.06));
  CHECK(close_rel(nu_bar(p, 2.0), 1.2 * std::pow(0.01, 1.5)));
  CHECK(close_rel(nu_bar(p, 0.01), 1.2));  // below the scale: full mass
  CHECK(close_rel(p.magnitude_tail(0.04), 1.2 * std::pow(2.0, -1.5)));

  const auto two = JumpLaw::pareto(2.0, 1.0, 2.0, JumpSide::two_sided, 0.25);
  CHECK(close_rel(nu_bar(two, 2.0), 0.25 * 2.0 * 0.25));

  const auto e = JumpLaw::exponential(0.5, 2.0);
  CHECK(close_rel(nu_bar(e, 3.0), 0.5 * std::exp(-1.5)));
  CHECK(close_rel(e.abs_moment2(), 8.0));

  CHECK_THROWS_AS(JumpLaw::pareto(1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(JumpLaw::exponential(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(JumpLaw::stable(1.0, 0.5), DomainError);
}

TEST_CASE("truncated moments add up to the full moments") {
  const auto p = JumpLaw::pareto(1.0, 0.5, 2.5);
  CHECK(close_rel(p.truncated_abs_moment1(1e12), p.abs_moment1(), 1e-9));
  CHECK(close_rel(p.truncated_abs_moment2(1e12), p.abs_moment2(), 1e-6));
  CHECK(p.truncated_abs_moment1(0.4) == 0.0);
  const auto e = JumpLaw::exponential(1.0, 0.3);
  CHECK(close_rel(e.truncated_abs_moment1(50.0), e.abs_moment1(), 1e-12));
}

TEST_CASE("drift and regularity of Levy models") {
  const LevyModel m(1.0, 0.0, JumpLaw::pareto(1.2, 0.02, 1.5));
  CHECK(close_rel(m.bounded_variation_drift(), -1.0 - 1.2 * 0.06));
  CHECK_FALSE(m.regular_upward());
  CHECK_THROWS_AS(m.require_regular_upward(), ConfigError);

  const LevyModel g(1.0, 0.05, JumpLaw::pareto(1.2, 0.02, 1.5));
  CHECK(g.regular_upward());
  CHECK(g.spectrally_positive());
  const LevyModel two(0.0, 1.0, JumpLaw::exponential(1.0, 1.0, JumpSide::two_sided));
  CHECK_FALSE(two.spectrally_positive());
}

TEST_CASE("stable parameters: skewness matches rho") {
  // rho = 1/2 - arctan(skew tan(pi alpha/2)) / (pi alpha)
  for (double alpha : {0.5, 0.8, 1.3, 1.5, 1.9}) {
    for (double rho : {0.3, 0.45, 0.5, 0.55}) {
      // admissible for alpha > 1: 1 - 1/alpha <= rho <= 1/alpha
      if (alpha > 1.0 && (rho < 1.0 - 1.0 / alpha || rho > 1.0 / alpha)) continue;
      const StableParams s(alpha, rho);
      const double back =
          0.5 - std::atan(s.skew() * std::tan(std::numbers::pi * alpha / 2.0)) / (std::numbers::pi * alpha);
      CHECK(back == doctest::Approx(rho).epsilon(1e-12));
    }
  }
  const StableParams sym(1.5, 0.5);
  CHECK(sym.skew() == 0.0);
  CHECK(sym.scale() == 1.0);
  CHECK(sym.norming(8.0) == doctest::Approx(4.0));

  const auto sp = StableParams::spectrally_positive_with_alpha(1.5);
  CHECK(sp.skew() == 1.0);
  CHECK(close_rel(sp.scale(), std::sqrt(0.5)));
  CHECK_THROWS_AS(StableParams(1.5, 0.5, true), DomainError);
  CHECK_THROWS_AS(StableParams(1.5, 0.2), DomainError);
  CHECK_THROWS_AS(StableParams(2.0, 0.4), DomainError);
}

TEST_CASE("describe names the model") {
  CHECK(describe(ProcessSpec{LevyModel(1.0, 0.5, JumpLaw::none())}).find("levy(") == 0);
  CHECK(describe(ProcessSpec{StableParams::spectrally_positive_with_alpha(1.5)}).find("spectrally_positive") !=
        std::string::npos);
}
