#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "lexc/levy_model.hpp"

namespace lexc {

// psi(lambda) = log E exp(-lambda X_1) for a spectrally positive process:
//   beta lambda + sigma^2 lambda^2 / 2 + int (e^{-lambda y} - 1 + lambda y) nu(dy),
// and lambda^alpha for spectrally positive stable parameters.
double laplace_exponent(const ProcessSpec& spec, double lambda);

// Gaver-Stehfest weights V_1..V_order (order even).
std::vector<double> stehfest_weights(int order);

// True when psi has a closed form, so the inversion can run in 50-digit arithmetic.
bool has_closed_form_exponent(const ProcessSpec& spec);

// f(x) from its Laplace transform F by Gaver-Stehfest.
double gaver_stehfest(const std::function<double(double)>& transform, double x, int order = 14);

struct ScaleFunctionTable {
  std::vector<double> x;
  std::vector<double> w;
  // d log W / d log x and d log W / dx at interior nodes; NaN at the two
  // nodes nearest each end of the grid.
  std::vector<double> log_slope;
  std::vector<double> height_tail;
  bool closed_form = false;
};

struct ScaleFunctionOptions {
  int order = 14;
  // Invert 1/psi numerically even when a closed form is available.
  bool force_numeric = false;
  // Run the inversion in 50-digit arithmetic. Only for models whose psi has
  // a closed form (no Pareto jumps); needed for orders above ~16.
  bool extended_precision = false;
};

ScaleFunctionTable scale_function(const ProcessSpec& spec, std::span<const double> x_grid,
                                  const ScaleFunctionOptions& options = {});

// Table from given W values (grid strictly increasing, W > 0).
ScaleFunctionTable make_scale_table(std::vector<double> x, std::vector<double> w);

// n(height > x) = d/dx log W(x) from a 5-point stencil, linearly interpolated
// between grid nodes. x must lie between the third node from each end.
double height_tail_from_W(const ScaleFunctionTable& table, double x);

// x,W,log_slope,height_tail
void write_scale_csv(const ScaleFunctionTable& table, std::ostream& os);

}  // namespace lexc
