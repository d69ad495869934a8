#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ratchet/error.hpp"

namespace ratchet {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;  // standard error of the slope, n - 2 degrees of freedom
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit ordinary_least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorCode::InvalidParams, "x and y differ in length");
  require(x.size() >= 2, ErrorCode::InsufficientSamples, "need at least two points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 1e-300 * (1.0 + mx * mx), ErrorCode::DegenerateX, "all x values are equal");
  LinearFit fit;
  fit.n = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.slope_se = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return fit;
}

}  // namespace ratchet
