#include "lexc/scalefn.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <fmt/format.h>

#include "lexc/errors.hpp"

namespace lexc {

namespace {

// e^{-z} - 1 + z without cancellation for small z.
double compensated_exp(double z) {
  if (z < 1e-3) return z * z * (0.5 - z * (1.0 / 6.0 - z / 24.0));
  return std::expm1(-z) + z;
}

double pareto_exponent_integral(const JumpLaw& jumps, double lambda) {
  const double ls = lambda * jumps.scale();
  const double theta = jumps.theta();
  auto integrand = [&](double u) { return compensated_exp(ls * u) * std::pow(u, -theta - 1.0); };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double value = integrator.integrate(integrand, 1.0, std::numeric_limits<double>::infinity());
  return jumps.rate() * theta * value;
}

}  // namespace

double laplace_exponent(const ProcessSpec& spec, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("laplace_exponent: lambda must be > 0");
  if (const auto* stable = std::get_if<StableParams>(&spec)) {
    if (!stable->spectrally_positive()) {
      throw UnsupportedError("laplace_exponent: stable parameters are not spectrally positive");
    }
    return std::pow(lambda, stable->alpha());
  }
  const auto& model = std::get<LevyModel>(spec);
  const JumpLaw& jumps = model.jumps();
  double psi = model.beta_drift() * lambda + 0.5 * model.sigma() * model.sigma() * lambda * lambda;
  switch (jumps.kind()) {
    case JumpKind::none:
      return psi;
    case JumpKind::compound_exponential:
    case JumpKind::compound_pareto:
      if (jumps.side() != JumpSide::positive_only) {
        throw UnsupportedError("laplace_exponent: two-sided jumps are not spectrally positive");
      }
      break;
    case JumpKind::stable_jumps:
      throw UnsupportedError("laplace_exponent: stable jump part inside LevyModel");
  }
  if (jumps.kind() == JumpKind::compound_exponential) {
    const double ml = jumps.mean_size() * lambda;
    return psi + jumps.rate() * ml * ml / (1.0 + ml);
  }
  return psi + pareto_exponent_integral(jumps, lambda);
}

namespace {

std::vector<long double> stehfest_weights_ld(int order) {
  if (order < 2 || order % 2 != 0) throw DomainError("stehfest_weights: order must be even >= 2");
  const int half = order / 2;
  auto fact = [](int n) {
    long double f = 1.0L;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  std::vector<long double> v(static_cast<std::size_t>(order));
  for (int k = 1; k <= order; ++k) {
    long double sum = 0.0L;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      sum += std::pow(static_cast<long double>(j), half) * fact(2 * j) /
             (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
    }
    const long double sign = (k + half) % 2 == 0 ? 1.0L : -1.0L;
    v[static_cast<std::size_t>(k - 1)] = sign * sum;
  }
  return v;
}

}  // namespace

std::vector<double> stehfest_weights(int order) {
  const auto v = stehfest_weights_ld(order);
  return std::vector<double>(v.begin(), v.end());
}

double gaver_stehfest(const std::function<double(double)>& transform, double x, int order) {
  if (!(x > 0.0)) throw DomainError("gaver_stehfest: x must be > 0");
  const auto weights = stehfest_weights_ld(order);
  const double a = std::log(2.0) / x;
  long double sum = 0.0L;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    sum += weights[k] * static_cast<long double>(transform(a * static_cast<double>(k + 1)));
  }
  return static_cast<double>(static_cast<long double>(a) * sum);
}

namespace {

// d/dx at nodes[centre] of the interpolating polynomial through nodes.
double lagrange_derivative(const double* x, const double* f, int n, int centre) {
  double d = 0.0;
  for (int j = 0; j < n; ++j) {
    double w;
    if (j == centre) {
      w = 0.0;
      for (int m = 0; m < n; ++m) {
        if (m != j) w += 1.0 / (x[centre] - x[m]);
      }
    } else {
      double num = 1.0, den = 1.0;
      for (int m = 0; m < n; ++m) {
        if (m == j) continue;
        den *= x[j] - x[m];
        if (m != centre) num *= x[centre] - x[m];
      }
      w = num / den;
    }
    d += w * f[j];
  }
  return d;
}

}  // namespace

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

Wide wide_exponent(const ProcessSpec& spec, const Wide& lambda) {
  if (const auto* stable = std::get_if<StableParams>(&spec)) {
    return pow(lambda, Wide(stable->alpha()));
  }
  const auto& m = std::get<LevyModel>(spec);
  const Wide sigma(m.sigma());
  Wide psi = Wide(m.beta_drift()) * lambda + sigma * sigma * lambda * lambda / 2;
  if (m.jumps().kind() == JumpKind::compound_exponential) {
    const Wide ml = Wide(m.jumps().mean_size()) * lambda;
    psi += Wide(m.jumps().rate()) * ml * ml / (1 + ml);
  }
  return psi;
}

Wide wide_gaver_stehfest(const ProcessSpec& spec, double x, int order) {
  const int half = order / 2;
  auto fact = [](int n) {
    Wide f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  const Wide a = log(Wide(2)) / Wide(x);
  Wide sum = 0;
  for (int k = 1; k <= order; ++k) {
    Wide v = 0;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      v += pow(Wide(j), half) * fact(2 * j) /
           (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
    }
    if ((k + half) % 2 != 0) v = -v;
    sum += v / wide_exponent(spec, a * k);
  }
  return a * sum;
}

}  // namespace

bool has_closed_form_exponent(const ProcessSpec& spec) {
  if (const auto* stable = std::get_if<StableParams>(&spec)) return stable->spectrally_positive();
  const auto& j = std::get<LevyModel>(spec).jumps();
  return j.kind() == JumpKind::none ||
         (j.kind() == JumpKind::compound_exponential && j.side() == JumpSide::positive_only);
}

ScaleFunctionTable make_scale_table(std::vector<double> x, std::vector<double> w) {
  if (x.size() != w.size()) throw ContractViolation("make_scale_table: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw DomainError("scale function grid must be positive");
    if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("scale function grid must be increasing");
    if (!(w[i] > 0.0)) throw InversionError("scale function must be positive on the grid");
  }
  ScaleFunctionTable table;
  const std::size_t n = x.size();
  table.height_tail.assign(n, std::numeric_limits<double>::quiet_NaN());
  table.log_slope.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> logw(n);
  for (std::size_t i = 0; i < n; ++i) logw[i] = std::log(w[i]);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double h = lagrange_derivative(&x[i - 2], &logw[i - 2], 5, 2);
    table.height_tail[i] = h;
    table.log_slope[i] = x[i] * h;
  }
  table.x = std::move(x);
  table.w = std::move(w);
  return table;
}

ScaleFunctionTable scale_function(const ProcessSpec& spec, std::span<const double> x_grid,
                                  const ScaleFunctionOptions& options) {
  std::vector<double> x(x_grid.begin(), x_grid.end());
  std::vector<double> w(x.size());
  const auto* stable = std::get_if<StableParams>(&spec);
  if (stable && !stable->spectrally_positive()) {
    throw UnsupportedError("scale_function: stable parameters are not spectrally positive");
  }
  const bool closed = stable != nullptr && !options.force_numeric;
  if (closed) {
    for (std::size_t i = 0; i < x.size(); ++i) w[i] = stable_scale_function(x[i], stable->alpha());
  } else {
    laplace_exponent(spec, 1.0);  // rejects unsupported models before inversion
    if (options.extended_precision && !has_closed_form_exponent(spec)) {
      throw UnsupportedError("scale_function: extended precision needs a closed-form psi");
    }
    if (options.order < 2 || options.order % 2 != 0) {
      throw DomainError("scale_function: order must be even >= 2");
    }
    auto transform = [&](double lambda) { return 1.0 / laplace_exponent(spec, lambda); };
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(x[i] > 0.0)) throw DomainError("scale_function: grid must be positive");
      w[i] = options.extended_precision
                 ? static_cast<double>(wide_gaver_stehfest(spec, x[i], options.order))
                 : gaver_stehfest(transform, x[i], options.order);
      if (i > 0 && x[i] > x[i - 1] && !(w[i] > w[i - 1])) {
        throw InversionError(fmt::format(
            "scale_function: inverted W is not increasing at x={:.6g}; lower the Stehfest "
            "order or use the stable closed form",
            x[i]));
      }
    }
  }
  auto table = make_scale_table(std::move(x), std::move(w));
  table.closed_form = closed;
  return table;
}

double height_tail_from_W(const ScaleFunctionTable& table, double x) {
  const auto& g = table.x;
  if (g.size() < 5 || x < g[2] || x > g[g.size() - 3]) {
    throw DomainError("height_tail_from_W: x must be interior to the grid");
  }
  const auto it = std::lower_bound(g.begin(), g.end(), x);
  auto i = static_cast<std::size_t>(std::distance(g.begin(), it));
  if (g[i] == x) return table.height_tail[i];
  const double frac = (x - g[i - 1]) / (g[i] - g[i - 1]);
  return table.height_tail[i - 1] + frac * (table.height_tail[i] - table.height_tail[i - 1]);
}

void write_scale_csv(const ScaleFunctionTable& table, std::ostream& os) {
  os << "x,W,log_slope,height_tail\n";
  for (std::size_t i = 0; i < table.x.size(); ++i) {
    auto num = [](double v) { return std::isnan(v) ? std::string() : fmt::format("{:.17g}", v); };
    os << fmt::format("{:.17g},{:.17g},{},{}\n", table.x[i], table.w[i], num(table.log_slope[i]),
                      num(table.height_tail[i]));
  }
}

}  // namespace lexc
