#pragma once

#include <cstddef>
#include <span>

namespace lrdecon {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// Classical OLS standard error of the slope (0 with fewer than 3 points).
  double slope_se = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope x. Needs two distinct x values.
LinearFit ols(std::span<const double> x, std::span<const double> y);

}  // namespace lrdecon
