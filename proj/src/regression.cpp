#include "lrdecon/regression.hpp"

#include <algorithm>
#include <cmath>

#include "lrdecon/error.hpp"

namespace lrdecon {

LinearFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("ols: x and y differ in length");
  if (x.size() < 2) throw InvalidInput("ols: at least two points are required");
  const double cnt = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= cnt;
  my /= cnt;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InvalidInput("ols: x values are all equal");
  LinearFit fit;
  fit.points = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double sse = std::max(0.0, syy - fit.slope * sxy);
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (x.size() > 2) fit.slope_se = std::sqrt(sse / (cnt - 2.0) / sxx);
  return fit;
}

}  // namespace lrdecon
