#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace ratchet {

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <class F>
double golden_section_maximize(F&& f, double lo, double hi, double tolerance = 1e-12,
                               int max_iterations = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iterations && (hi - lo) > tolerance * (std::abs(lo) + std::abs(hi) + 1e-300); ++i) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

template <class F>
double golden_section_minimize(F&& f, double lo, double hi, double tolerance = 1e-12,
                               int max_iterations = 200) {
  return golden_section_maximize([&](double x) { return -f(x); }, lo, hi, tolerance,
                                 max_iterations);
}

struct ScanMaximum {
  double x = 0.0;
  double value = 0.0;
  bool interior = false;
};

/// Log-spaced grid scan of f over [lo, hi] followed by golden-section
/// refinement (in log x) between the neighbours of the best grid point.
template <class F>
ScanMaximum maximize_on_log_grid(F&& f, double lo, double hi, int points_per_decade) {
  const double decades = std::log10(hi / lo);
  const auto n = static_cast<std::size_t>(std::max(2.0, std::ceil(decades * points_per_decade) + 1));
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  std::size_t best = 0;
  double best_value = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f(lo * std::exp(step * static_cast<double>(i)));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  ScanMaximum result;
  if (best == 0 || best == n - 1) {
    result.x = lo * std::exp(step * static_cast<double>(best));
    result.value = best_value;
    result.interior = false;
    return result;
  }
  const double a = std::log(lo) + step * static_cast<double>(best - 1);
  const double b = std::log(lo) + step * static_cast<double>(best + 1);
  const double log_x = golden_section_maximize([&](double u) { return f(std::exp(u)); }, a, b,
                                               1e-15, 200);
  result.x = std::exp(log_x);
  result.value = f(result.x);
  if (result.value < best_value) {
    result.x = lo * std::exp(step * static_cast<double>(best));
    result.value = best_value;
  }
  result.interior = true;
  return result;
}

}  // namespace ratchet
