#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ratchet/dnp_profile.hpp"
#include "ratchet/error.hpp"
#include "ratchet/golden_section.hpp"
#include "ratchet/linear_fit.hpp"
#include "ratchet/ratchet_analytic.hpp"

// Fit of signal_i ~ A * total_polarization(omega_i; kappa_e, eps1, eps2) with
// bandwidth and duration taken from the profile metadata. The search runs in
// theta = (ln A, ln kappa_e, ln eps1, logit(eps2 / eps1)) so every parameter
// stays positive and eps2 <= eps1 holds by construction.
namespace ratchet {

struct FitResult {
  double amplitude = 0.0;
  double kappa_e_fit = 0.0;
  double eps1_fit = 0.0;
  double eps2_fit = 0.0;
  double omega_opt = 0.0;
  double residual_norm = 0.0;
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // (A, kappa_e, eps1, eps2)
  double condition_number = 0.0;  // of the log-space covariance
  bool extrapolated = false;      // optimum outside the sampled rates or on the search boundary
  bool ambiguous = false;         // condition_number > 1e10
  int iterations = 0;
};

// Relative weighting divides each residual by its measured signal, which matches
// multiplicative noise.
enum class FitWeighting { Absolute, Relative };

inline FitWeighting parse_fit_weighting(const std::string& s) {
  if (s == "absolute") return FitWeighting::Absolute;
  if (s == "relative") return FitWeighting::Relative;
  throw Error(ErrorCode::InvalidParams, "unknown fit weighting '" + s + "'");
}

inline const char* to_string(FitWeighting w) {
  return w == FitWeighting::Relative ? "relative" : "absolute";
}

struct FitOptions {
  FitWeighting weighting = FitWeighting::Absolute;
  int max_iterations = 500;
  double relative_tolerance = 1e-10;
  double ambiguity_threshold = 1e10;
  RateWindow search_window{};
};

namespace detail {

using Theta = Eigen::Vector4d;

inline double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

inline Theta to_theta(double a, double kappa, double eps1, double eps2) {
  const double s = std::clamp(eps2 / eps1, 1e-9, 1.0 - 1e-9);
  return {std::log(a), std::log(kappa), std::log(eps1), std::log(s / (1.0 - s))};
}

struct NaturalParams {
  double a, kappa, eps1, eps2;
};

inline NaturalParams from_theta(const Theta& t) {
  const double eps1 = std::exp(t(2));
  return {std::exp(t(0)), std::exp(t(1)), eps1, eps1 * logistic(t(3))};
}

class ProfileModel {
 public:
  explicit ProfileModel(const DnpProfile& profile,
                        FitWeighting weighting = FitWeighting::Absolute)
      : profile_(profile), weights_(profile.size(), 1.0) {
    require(profile.meta().bandwidth > 0.0, ErrorCode::InvalidParams,
            "profile metadata needs a positive bandwidth");
    duration_ = profile.meta().duration > 0.0 ? profile.meta().duration : 1.0;
    if (weighting == FitWeighting::Relative) {
      for (std::size_t i = 0; i < profile.size(); ++i) {
        require(profile.signal()[i] > 0.0, ErrorCode::InvalidParams,
                "relative weighting needs strictly positive signal");
        weights_[i] = 1.0 / profile.signal()[i];
      }
    }
  }

  RatchetParams ratchet(const NaturalParams& p) const {
    return {p.kappa, p.eps1, p.eps2, profile_.meta().bandwidth, duration_};
  }

  Eigen::VectorXd residuals(const Theta& t) const {
    const auto p = from_theta(t);
    const auto rp = ratchet(p);
    const auto n = static_cast<Eigen::Index>(profile_.size());
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      r(i) = (p.a * total_polarization(rp, profile_.omega_r()[k]) - profile_.signal()[k]) *
             weights_[k];
    }
    return r;
  }

  Eigen::MatrixXd jacobian(const Theta& t) const {
    const auto n = static_cast<Eigen::Index>(profile_.size());
    Eigen::MatrixXd j(n, 4);
    for (int c = 0; c < 4; ++c) {
      const double h = 1e-6 * std::max(1.0, std::abs(t(c)));
      Theta tp = t, tm = t;
      tp(c) += h;
      tm(c) -= h;
      j.col(c) = (residuals(tp) - residuals(tm)) / (2.0 * h);
    }
    return j;
  }

  double cost(const Theta& t) const { return residuals(t).squaredNorm(); }

 private:
  const DnpProfile& profile_;
  std::vector<double> weights_;
  double duration_ = 1.0;
};

/// Deterministic starting points: kappa_e from the rising-edge half-maximum,
/// eps1 = sqrt(omega_max * B), a spread of eps2 / eps1 ratios, amplitude matched at the peak.
inline std::vector<Theta> initial_guesses(const DnpProfile& profile, const ProfileModel& model) {
  const auto& w = profile.omega_r();
  const auto& s = profile.signal();
  const std::size_t imax = profile.argmax();
  const double peak = s[imax];
  double half = w.front();
  for (std::size_t i = 0; i <= imax; ++i) {
    if (s[i] >= 0.5 * peak) {
      half = w[i];
      break;
    }
  }
  const double eps1 = std::sqrt(w[imax] * profile.meta().bandwidth);
  std::vector<Theta> out;
  for (double ratio : {1.0 / 3.0, 0.6, 0.9}) {
    for (double kscale : {1.0, 0.3, 3.0}) {
      const double kappa = half * kscale;
      const double eps2 = eps1 * ratio;
      NaturalParams p{1.0, kappa, eps1, eps2};
      const double unit = total_polarization(model.ratchet(p), w[imax]);
      const double a = (unit > 0.0 && peak > 0.0) ? peak / unit : 1.0;
      out.push_back(to_theta(a, kappa, eps1, eps2));
    }
  }
  return out;
}

struct LmOutcome {
  Theta theta;
  double cost;
  int iterations;
};

inline LmOutcome levenberg_marquardt(const ProfileModel& model, Theta theta,
                                     const FitOptions& options) {
  double cost = model.cost(theta);
  require(std::isfinite(cost), ErrorCode::FitDiverged, "initial cost is not finite");
  double lambda = 1e-3;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const Eigen::VectorXd r = model.residuals(theta);
    const Eigen::MatrixXd j = model.jacobian(theta);
    const Eigen::Matrix4d jtj = j.transpose() * j;
    const Eigen::Vector4d g = j.transpose() * r;
    bool accepted = false;
    double new_cost = cost;
    while (lambda < 1e16) {
      Eigen::Matrix4d a = jtj;
      for (int d = 0; d < 4; ++d) a(d, d) += lambda * std::max(jtj(d, d), 1e-300);
      const Theta step = a.ldlt().solve(-g);
      const Theta trial = theta + step;
      const double c = step.allFinite() ? model.cost(trial) : INFINITY;
      if (std::isfinite(c) && c < cost) {
        theta = trial;
        new_cost = c;
        lambda *= 0.5;
        accepted = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) break;
    const double decrease = (cost - new_cost) / std::max(cost, 1e-300);
    cost = new_cost;
    if (decrease < options.relative_tolerance) {
      ++it;
      break;
    }
  }
  require(std::isfinite(cost), ErrorCode::FitDiverged, "cost became non-finite");
  return {theta, cost, it};
}

}  // namespace detail

inline FitResult fit_profile(const DnpProfile& profile, const std::optional<FitResult>& init = {},
                             const FitOptions& options = {}) {
  const detail::ProfileModel model(profile, options.weighting);
  std::vector<detail::Theta> starts;
  if (init) {
    starts.push_back(
        detail::to_theta(init->amplitude, init->kappa_e_fit, init->eps1_fit, init->eps2_fit));
  } else {
    starts = detail::initial_guesses(profile, model);
  }

  std::optional<detail::LmOutcome> best;
  for (const auto& start : starts) {
    if (!start.allFinite()) continue;
    auto outcome = detail::levenberg_marquardt(model, start, options);
    if (!best || outcome.cost < best->cost) best = outcome;
  }
  require(best.has_value(), ErrorCode::FitDiverged, "no finite starting point");

  const auto p = detail::from_theta(best->theta);
  FitResult fit;
  fit.amplitude = p.a;
  fit.kappa_e_fit = p.kappa;
  fit.eps1_fit = p.eps1;
  fit.eps2_fit = p.eps2;
  fit.residual_norm = std::sqrt(best->cost);
  fit.iterations = best->iterations;

  const Eigen::MatrixXd j = model.jacobian(best->theta);
  const double dof = std::max<double>(1.0, static_cast<double>(profile.size()) - 4.0);
  const double sigma2 = best->cost / dof;
  const Eigen::Matrix4d jtj = j.transpose() * j;
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(jtj, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(3);
  fit.condition_number = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  fit.ambiguous = !(fit.condition_number <= options.ambiguity_threshold);
  Eigen::Vector4d inv = Eigen::Vector4d::Zero();
  for (int d = 0; d < 4; ++d) inv(d) = sv(d) > smax * 1e-14 ? 1.0 / sv(d) : 0.0;
  const Eigen::Matrix4d cov_theta = sigma2 * svd.matrixV() * inv.asDiagonal() *
                                    svd.matrixU().transpose();
  const double s = p.eps2 / p.eps1;
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g(0, 0) = p.a;
  g(1, 1) = p.kappa;
  g(2, 2) = p.eps1;
  g(3, 2) = p.eps2;
  g(3, 3) = p.eps1 * s * (1.0 - s);
  fit.covariance = g * cov_theta * g.transpose();

  const RatchetParams rp = model.ratchet(p);
  const auto opt = maximize_on_log_grid([&](double w) { return buildup_rate(w, rp); },
                                        options.search_window.low, options.search_window.high,
                                        omega_opt_points_per_decade);
  fit.omega_opt = opt.x;
  fit.extrapolated = !opt.interior || opt.x < profile.omega_r().front() ||
                     opt.x > profile.omega_r().back();
  return fit;
}

struct OmegaOptRegression {
  double slope = 0.0;  // d omega_opt / d eta_e (Hz/W)
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
};

inline OmegaOptRegression regress_omega_opt(const std::vector<std::pair<double, double>>& points) {
  require(points.size() >= 3, ErrorCode::InsufficientSamples,
          "omega_opt regression needs at least 3 points");
  std::vector<double> x, y;
  for (const auto& [eta, w] : points) {
    x.push_back(eta);
    y.push_back(w);
  }
  const auto fit = ordinary_least_squares(x, y);
  return {fit.slope, fit.intercept, fit.r2, fit.slope_se};
}

}  // namespace ratchet
