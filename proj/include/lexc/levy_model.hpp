#pragma once

#include <string>
#include <utility>
#include <variant>

namespace lexc {

enum class JumpKind { none, compound_pareto, compound_exponential, stable_jumps };
enum class JumpSide { two_sided, positive_only };

std::string to_string(JumpKind kind);
std::string to_string(JumpSide side);
JumpKind parse_jump_kind(const std::string& s);
JumpSide parse_jump_side(const std::string& s);

// Closed family of jump laws. Every member has an exact tail, mean and
// sampler, so nu_bar, compensators and simulations stay mutually consistent.
//
// compound_pareto: rate r, sizes with P(|J| >= y) = (y/scale)^-theta, y >= scale.
// compound_exponential: rate r, sizes Exp with the given mean.
// stable_jumps: Levy measure of a strictly stable law of index alpha and
//   skewness `skew` (unit scale parameter). Only used for tails; paths of
//   stable processes go through simulate_stable_path.
//
// For two_sided laws a fraction `positive_fraction` of the mass sits on
// positive sizes (default 1/2).
class JumpLaw {
 public:
  JumpLaw() = default;

  static JumpLaw none();
  static JumpLaw pareto(double rate, double scale, double theta,
                        JumpSide side = JumpSide::positive_only, double positive_fraction = 0.5);
  static JumpLaw exponential(double rate, double mean, JumpSide side = JumpSide::positive_only,
                             double positive_fraction = 0.5);
  static JumpLaw stable(double alpha, double skew);

  JumpKind kind() const noexcept { return kind_; }
  JumpSide side() const noexcept { return side_; }
  double rate() const noexcept { return rate_; }
  double scale() const noexcept { return scale_; }
  double theta() const noexcept { return theta_; }
  double mean_size() const noexcept { return mean_; }
  double alpha() const noexcept { return alpha_; }
  double skew() const noexcept { return skew_; }
  double positive_fraction() const noexcept {
    return side_ == JumpSide::positive_only ? 1.0 : positive_fraction_;
  }

  bool finite_activity() const noexcept {
    return kind_ == JumpKind::none || kind_ == JumpKind::compound_pareto ||
           kind_ == JumpKind::compound_exponential;
  }

  // Mass of (unsigned) jump sizes >= y, i.e. rate * P(|J| >= y).
  double magnitude_tail(double y) const;
  // E|J| and E[J^2] for a single jump (finite-activity kinds).
  double abs_moment1() const;
  double abs_moment2() const;
  // E[|J|; |J| < c] and E[J^2; |J| < c] per jump.
  double truncated_abs_moment1(double c) const;
  double truncated_abs_moment2(double c) const;

  bool operator==(const JumpLaw&) const = default;

 private:
  JumpKind kind_ = JumpKind::none;
  JumpSide side_ = JumpSide::positive_only;
  double rate_ = 0.0;
  double scale_ = 0.0;
  double theta_ = 0.0;
  double mean_ = 0.0;
  double alpha_ = 0.0;
  double skew_ = 0.0;
  double positive_fraction_ = 0.5;
};

// X_t = -beta_drift * t + sigma * B_t + (compensated jumps). With finite-mean
// jumps E[X_1] = -beta_drift.
class LevyModel {
 public:
  LevyModel() = default;
  LevyModel(double beta_drift, double sigma, JumpLaw jumps);

  double beta_drift() const noexcept { return beta_; }
  double sigma() const noexcept { return sigma_; }
  const JumpLaw& jumps() const noexcept { return jumps_; }

  bool spectrally_positive() const noexcept {
    return jumps_.kind() == JumpKind::none || jumps_.side() == JumpSide::positive_only;
  }
  bool finite_mean_jumps() const noexcept;

  // Drift between jumps for finite-activity models: -beta - E[signed jump sum per unit time].
  double bounded_variation_drift() const;

  // 0 regular for (0, inf).
  bool regular_upward() const;
  void require_regular_upward() const;

  bool operator==(const LevyModel&) const = default;

 private:
  double beta_ = 0.0;
  double sigma_ = 0.0;
  JumpLaw jumps_;
};

// Strictly stable law with negativity parameter rho = P(Y_1 <= 0).
//
// Characteristic exponent (Samorodnitsky-Taqqu form A, alpha != 1):
//   log E exp(i u Y_1) = -c |u|^alpha (1 - i skew tan(pi alpha / 2) sgn u).
// The scale c is 1, except in the spectrally positive case where
// c = |cos(pi alpha / 2)| so that log E exp(-lambda Y_1) = lambda^alpha.
// At alpha = 2 both conventions give Var(Y_1) = 2.
class StableParams {
 public:
  StableParams() = default;
  StableParams(double alpha, double rho, bool spectrally_positive = false);

  static StableParams spectrally_positive_with_alpha(double alpha);

  double alpha() const noexcept { return alpha_; }
  double rho() const noexcept { return rho_; }
  bool spectrally_positive() const noexcept { return spectrally_positive_; }
  double skew() const noexcept { return skew_; }
  double scale() const noexcept { return scale_; }

  // c(t) = t^(1/alpha).
  double norming(double t) const;

  bool operator==(const StableParams&) const = default;

 private:
  double alpha_ = 2.0;
  double rho_ = 0.5;
  bool spectrally_positive_ = false;
  double skew_ = 0.0;
  double scale_ = 1.0;
};

using ProcessSpec = std::variant<LevyModel, StableParams>;

std::string describe(const ProcessSpec& spec);

// --- Closed-form laws ------------------------------------------------------

// nu([x, inf)).
double nu_bar(const JumpLaw& jumps, double x);

// n^Y(zeta > t) = t^-rho / Gamma(1 - rho).
double stable_lifetime_tail(double t, double rho);

struct BrownianTails {
  double lifetime_tail;
  double height_tail;
};
// n(zeta > t) = t^-1/2 / sqrt(pi/2), n(height > x) = 1/x.
BrownianTails brownian_excursion_tails(double t, double x);

// n^Y(height > x) = (alpha - 1)/x for spectrally positive Y.
double stable_height_tail(double x, double alpha);

// P(P <= x) = 1 - (x/beta)^-theta on x > beta.
double pareto_limit_cdf(double x, double beta, double theta);

// (alpha - 1) Gamma(1 - 1/alpha).
double height_lifetime_ratio_constant(double alpha);

// W^Y(x) = x^(alpha-1)/Gamma(alpha).
double stable_scale_function(double x, double alpha);

}  // namespace lexc
