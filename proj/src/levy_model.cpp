#include "lexc/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lexc/errors.hpp"

namespace lexc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string to_string(JumpKind kind) {
  switch (kind) {
    case JumpKind::none:
      return "none";
    case JumpKind::compound_pareto:
      return "compound_pareto";
    case JumpKind::compound_exponential:
      return "compound_exponential";
    case JumpKind::stable_jumps:
      return "stable_jumps";
  }
  return "?";
}

std::string to_string(JumpSide side) {
  return side == JumpSide::two_sided ? "two_sided" : "positive_only";
}

JumpKind parse_jump_kind(const std::string& s) {
  if (s == "none") return JumpKind::none;
  if (s == "compound_pareto") return JumpKind::compound_pareto;
  if (s == "compound_exponential") return JumpKind::compound_exponential;
  if (s == "stable_jumps") return JumpKind::stable_jumps;
  throw ConfigError("unknown jump kind '" + s + "'");
}

JumpSide parse_jump_side(const std::string& s) {
  if (s == "two_sided") return JumpSide::two_sided;
  if (s == "positive_only") return JumpSide::positive_only;
  throw ConfigError("unknown jump side '" + s + "'");
}

// --- JumpLaw ----------------------------------------------------------------

JumpLaw JumpLaw::none() { return JumpLaw{}; }

JumpLaw JumpLaw::pareto(double rate, double scale, double theta, JumpSide side,
                        double positive_fraction) {
  require(finite_positive(rate), "compound_pareto: rate must be > 0");
  require(finite_positive(scale), "compound_pareto: scale must be > 0");
  require(std::isfinite(theta) && theta > 1.0, "compound_pareto: theta must be > 1");
  require(positive_fraction > 0.0 && positive_fraction <= 1.0,
          "positive_fraction must lie in (0, 1]");
  JumpLaw j;
  j.kind_ = JumpKind::compound_pareto;
  j.side_ = side;
  j.rate_ = rate;
  j.scale_ = scale;
  j.theta_ = theta;
  j.mean_ = scale * theta / (theta - 1.0);
  j.positive_fraction_ = positive_fraction;
  return j;
}

JumpLaw JumpLaw::exponential(double rate, double mean, JumpSide side, double positive_fraction) {
  require(finite_positive(rate), "compound_exponential: rate must be > 0");
  require(finite_positive(mean), "compound_exponential: mean must be > 0");
  require(positive_fraction > 0.0 && positive_fraction <= 1.0,
          "positive_fraction must lie in (0, 1]");
  JumpLaw j;
  j.kind_ = JumpKind::compound_exponential;
  j.side_ = side;
  j.rate_ = rate;
  j.mean_ = mean;
  j.positive_fraction_ = positive_fraction;
  return j;
}

JumpLaw JumpLaw::stable(double alpha, double skew) {
  require(alpha > 0.0 && alpha < 2.0, "stable_jumps: alpha must lie in (0, 2)");
  require(skew >= -1.0 && skew <= 1.0, "stable_jumps: skew must lie in [-1, 1]");
  require(alpha != 1.0 || skew == 0.0, "stable_jumps: alpha = 1 requires skew = 0");
  JumpLaw j;
  j.kind_ = JumpKind::stable_jumps;
  j.side_ = skew == 1.0 ? JumpSide::positive_only : JumpSide::two_sided;
  j.alpha_ = alpha;
  j.skew_ = skew;
  j.mean_ = std::numeric_limits<double>::quiet_NaN();
  j.positive_fraction_ = (1.0 + skew) / 2.0;
  return j;
}

double JumpLaw::magnitude_tail(double y) const {
  switch (kind_) {
    case JumpKind::none:
      return 0.0;
    case JumpKind::compound_pareto:
      return y < scale_ ? rate_ : rate_ * std::pow(y / scale_, -theta_);
    case JumpKind::compound_exponential:
      return y <= 0.0 ? rate_ : rate_ * std::exp(-y / mean_);
    case JumpKind::stable_jumps:
      break;
  }
  throw UsageError("magnitude_tail: stable jump measure has infinite mass");
}

double JumpLaw::abs_moment1() const {
  switch (kind_) {
    case JumpKind::none:
      return 0.0;
    case JumpKind::compound_pareto:
    case JumpKind::compound_exponential:
      return mean_;
    case JumpKind::stable_jumps:
      break;
  }
  throw UsageError("abs_moment1: not defined for stable jumps");
}

double JumpLaw::abs_moment2() const {
  switch (kind_) {
    case JumpKind::none:
      return 0.0;
    case JumpKind::compound_pareto:
      return theta_ > 2.0 ? scale_ * scale_ * theta_ / (theta_ - 2.0)
                          : std::numeric_limits<double>::infinity();
    case JumpKind::compound_exponential:
      return 2.0 * mean_ * mean_;
    case JumpKind::stable_jumps:
      break;
  }
  throw UsageError("abs_moment2: not defined for stable jumps");
}

double JumpLaw::truncated_abs_moment1(double c) const {
  switch (kind_) {
    case JumpKind::none:
      return 0.0;
    case JumpKind::compound_pareto: {
      if (c <= scale_) return 0.0;
      // int_s^c y theta s^theta y^-theta-1 dy
      const double k = theta_ * std::pow(scale_, theta_) / (1.0 - theta_);
      return k * (std::pow(c, 1.0 - theta_) - std::pow(scale_, 1.0 - theta_));
    }
    case JumpKind::compound_exponential: {
      const double m = mean_;
      return m - std::exp(-c / m) * (c + m);
    }
    case JumpKind::stable_jumps:
      break;
  }
  throw UsageError("truncated_abs_moment1: not defined for stable jumps");
}

double JumpLaw::truncated_abs_moment2(double c) const {
  switch (kind_) {
    case JumpKind::none:
      return 0.0;
    case JumpKind::compound_pareto: {
      if (c <= scale_) return 0.0;
      const double s = scale_;
      if (theta_ == 2.0) return 2.0 * s * s * std::log(c / s);
      const double k = theta_ * std::pow(s, theta_) / (2.0 - theta_);
      return k * (std::pow(c, 2.0 - theta_) - std::pow(s, 2.0 - theta_));
    }
    case JumpKind::compound_exponential: {
      const double m = mean_;
      return 2.0 * m * m - std::exp(-c / m) * (c * c + 2.0 * m * c + 2.0 * m * m);
    }
    case JumpKind::stable_jumps:
      break;
  }
  throw UsageError("truncated_abs_moment2: not defined for stable jumps");
}

// --- LevyModel --------------------------------------------------------------

LevyModel::LevyModel(double beta_drift, double sigma, JumpLaw jumps)
    : beta_(beta_drift), sigma_(sigma), jumps_(jumps) {
  require(std::isfinite(beta_drift), "LevyModel: beta_drift must be finite");
  require(std::isfinite(sigma) && sigma >= 0.0, "LevyModel: sigma must be >= 0");
}

bool LevyModel::finite_mean_jumps() const noexcept { return jumps_.finite_activity(); }

double LevyModel::bounded_variation_drift() const {
  if (!jumps_.finite_activity()) throw UsageError("bounded_variation_drift: infinite activity");
  const double signed_mean = (2.0 * jumps_.positive_fraction() - 1.0) * jumps_.abs_moment1();
  return -beta_ - jumps_.rate() * signed_mean;
}

bool LevyModel::regular_upward() const {
  if (sigma_ > 0.0) return true;
  if (jumps_.kind() == JumpKind::stable_jumps) {
    return jumps_.alpha() >= 1.0 || jumps_.skew() > -1.0;
  }
  return bounded_variation_drift() > 0.0;
}

void LevyModel::require_regular_upward() const {
  if (!regular_upward()) {
    throw ConfigError(
        "model rejected: 0 is not regular for (0, inf); add a Gaussian part (sigma > 0)");
  }
}

// --- StableParams -----------------------------------------------------------

StableParams::StableParams(double alpha, double rho, bool spectrally_positive)
    : alpha_(alpha), rho_(rho), spectrally_positive_(spectrally_positive) {
  require(alpha > 0.0 && alpha <= 2.0, "StableParams: alpha must lie in (0, 2]");
  require(rho > 0.0 && rho < 1.0, "StableParams: rho must lie in (0, 1)");
  const double pi = std::numbers::pi;
  if (spectrally_positive) {
    require(alpha > 1.0, "StableParams: spectrally positive requires alpha > 1");
    require(std::abs(alpha * rho - 1.0) <= 1e-12,
            "StableParams: spectrally positive requires alpha * rho = 1");
    skew_ = 1.0;
    scale_ = std::abs(std::cos(pi * alpha / 2.0));
    return;
  }
  if (alpha == 2.0 || alpha == 1.0) {
    require(std::abs(rho - 0.5) <= 1e-12, "StableParams: alpha in {1, 2} requires rho = 1/2");
    skew_ = 0.0;
    return;
  }
  const double positivity = 1.0 - rho;
  const double arg = pi * alpha * (positivity - 0.5);
  require(std::abs(arg) < pi / 2.0, "StableParams: (alpha, rho) outside the admissible range");
  const double skew = std::tan(arg) / std::tan(pi * alpha / 2.0);
  require(std::abs(skew) <= 1.0 + 1e-12, "StableParams: (alpha, rho) outside the admissible range");
  skew_ = std::clamp(skew, -1.0, 1.0);
}

StableParams StableParams::spectrally_positive_with_alpha(double alpha) {
  return StableParams(alpha, 1.0 / alpha, true);
}

double StableParams::norming(double t) const { return std::pow(t, 1.0 / alpha_); }

std::string describe(const ProcessSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* m = std::get_if<LevyModel>(&spec)) {
    os << "levy(beta=" << m->beta_drift() << ", sigma=" << m->sigma()
       << ", jumps=" << to_string(m->jumps().kind()) << ")";
  } else {
    const auto& s = std::get<StableParams>(spec);
    os << "stable(alpha=" << s.alpha() << ", rho=" << s.rho()
       << (s.spectrally_positive() ? ", spectrally_positive" : "") << ")";
  }
  return os.str();
}

// --- closed forms -----------------------------------------------------------

double nu_bar(const JumpLaw& jumps, double x) {
  if (!(x > 0.0)) throw DomainError("nu_bar: x must be > 0");
  if (jumps.kind() == JumpKind::stable_jumps) {
    const double a = jumps.alpha();
    const double pi = std::numbers::pi;
    const double total = a == 1.0 ? pi / 2.0 : -std::tgamma(-a) * std::cos(pi * a / 2.0);
    const double c_plus = (1.0 + jumps.skew()) / 2.0 / total;
    return c_plus * std::pow(x, -a) / a;
  }
  return jumps.positive_fraction() * jumps.magnitude_tail(x);
}

double stable_lifetime_tail(double t, double rho) {
  if (!(t > 0.0)) throw DomainError("stable_lifetime_tail: t must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("stable_lifetime_tail: rho must lie in (0, 1)");
  return std::pow(t, -rho) / std::tgamma(1.0 - rho);
}

BrownianTails brownian_excursion_tails(double t, double x) {
  if (!(t > 0.0) || !(x > 0.0)) throw DomainError("brownian_excursion_tails: t, x must be > 0");
  return {1.0 / (std::sqrt(t) * std::sqrt(std::numbers::pi / 2.0)), 1.0 / x};
}

double stable_height_tail(double x, double alpha) {
  if (!(x > 0.0)) throw DomainError("stable_height_tail: x must be > 0");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("stable_height_tail: alpha must lie in (1, 2]");
  return (alpha - 1.0) / x;
}

double pareto_limit_cdf(double x, double beta, double theta) {
  if (!(beta > 0.0) || !(theta > 1.0)) throw DomainError("pareto_limit_cdf: need beta > 0, theta > 1");
  if (x <= beta) return 0.0;
  return 1.0 - std::pow(x / beta, -theta);
}

double height_lifetime_ratio_constant(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    throw DomainError("height_lifetime_ratio_constant: alpha must lie in (1, 2]");
  }
  return (alpha - 1.0) * std::tgamma(1.0 - 1.0 / alpha);
}

double stable_scale_function(double x, double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("stable_scale_function: alpha must lie in (1, 2]");
  if (x < 0.0) return 0.0;
  return std::pow(x, alpha - 1.0) / std::tgamma(alpha);
}

}  // namespace lexc
