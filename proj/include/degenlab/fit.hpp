#pragma once

#include <span>

namespace degenlab {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  int points = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs at least two distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace degenlab
