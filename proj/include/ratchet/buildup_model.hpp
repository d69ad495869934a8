#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ratchet/dnp_profile.hpp"
#include "ratchet/error.hpp"
#include "ratchet/golden_section.hpp"
#include "ratchet/linear_fit.hpp"
#include "ratchet/lz_cascade.hpp"
#include "ratchet/ratchet_analytic.hpp"
#include "ratchet/spin_system.hpp"

// Electron -> proximal shell -> bulk compartment chain:
//   dP_p/dt = G (P_e - P_p) - k_d (P_p - P_b) - P_p / T1n
//   dP_b/dt = k_d (n_p / n_b) (P_p - P_b)   - P_b / T1n
// with P_e = 1 - exp(-kappa_e / omega_r) and G = omega_r * (per-sweep transfer).
// kappa_d = infinity merges the two pools into one of weight n_p + n_b.
namespace ratchet {

inline constexpr double default_t1n = 300.0;       // s
inline constexpr double default_pool_ratio = 100;  // n_bulk / n_prox
inline constexpr double thermal_polarization_7t = 1e-5;

inline double electron_polarization(double t, double kappa_e) {
  require(t >= 0.0, ErrorCode::DomainError, "t must be non-negative");
  require(kappa_e >= 0.0, ErrorCode::DomainError, "kappa_e must be non-negative");
  return -std::expm1(-t * kappa_e);
}

struct RateChainParams {
  double kappa_e = 0.0;   // 1/s
  double omega_r = 1.0;   // sweeps per second
  double inj_rate = 0.0;  // G (1/s)
  double kappa_d = std::numeric_limits<double>::infinity();  // 1/s
  double t1n = default_t1n;
  double n_prox = 1.0;
  double n_bulk = default_pool_ratio;

  void validate() const {
    auto nonneg = [](double v, const char* name) {
      require(!std::isnan(v) && v >= 0.0, ErrorCode::InvalidParams,
              std::string(name) + " must be non-negative");
    };
    nonneg(kappa_e, "kappa_e");
    nonneg(inj_rate, "inj_rate");
    nonneg(kappa_d, "kappa_d");
    require(units::finite(kappa_e) && units::finite(inj_rate), ErrorCode::InvalidParams,
            "kappa_e and inj_rate must be finite");
    require(units::finite(omega_r) && omega_r > 0.0, ErrorCode::InvalidParams,
            "omega_r must be positive");
    require(t1n > 0.0, ErrorCode::InvalidParams, "t1n must be positive");
    require(units::finite(n_prox) && n_prox > 0.0, ErrorCode::InvalidParams,
            "n_prox must be positive");
    require(units::finite(n_bulk) && n_bulk >= n_prox, ErrorCode::InvalidParams,
            "n_bulk must be at least n_prox");
  }

  bool diffusion_unlimited() const noexcept { return std::isinf(kappa_d); }
  double electron_steady_state() const { return -std::expm1(-kappa_e / omega_r); }
  double prox_fraction() const noexcept { return n_prox / (n_prox + n_bulk); }

  /// Largest dt accepted by simulate_buildup.
  double max_step() const noexcept {
    double s = t1n;
    if (inj_rate > 0.0) s = std::min(s, 1.0 / inj_rate);
    if (kappa_d > 0.0 && !diffusion_unlimited()) s = std::min(s, 1.0 / kappa_d);
    return s / 10.0;
  }

  friend bool operator==(const RateChainParams&, const RateChainParams&) = default;
};

struct BuildupSeries {
  std::vector<double> time;
  std::vector<double> pe;  // electron
  std::vector<double> pp;  // proximal shell
  std::vector<double> pb;  // bulk

  std::size_t size() const noexcept { return time.size(); }
};

namespace detail {

struct ChainState {
  double pp = 0.0;
  double pb = 0.0;
};

class ChainIntegrator {
 public:
  explicit ChainIntegrator(const RateChainParams& p)
      : g_(p.inj_rate),
        pe_(p.electron_steady_state()),
        kd_(p.kappa_d),
        r_(p.n_prox / p.n_bulk),
        f_(p.prox_fraction()),
        relax_(1.0 / p.t1n),
        merged_(p.diffusion_unlimited()) {}

  ChainState derivative(const ChainState& s) const noexcept {
    if (merged_) {
      const double d = g_ * f_ * (pe_ - s.pp) - relax_ * s.pp;
      return {d, d};
    }
    return {g_ * (pe_ - s.pp) - kd_ * (s.pp - s.pb) - relax_ * s.pp,
            kd_ * r_ * (s.pp - s.pb) - relax_ * s.pb};
  }

  ChainState step(const ChainState& s, double h) const noexcept {
    auto axpy = [](const ChainState& a, double c, const ChainState& k) {
      return ChainState{a.pp + c * k.pp, a.pb + c * k.pb};
    };
    const ChainState k1 = derivative(s);
    const ChainState k2 = derivative(axpy(s, 0.5 * h, k1));
    const ChainState k3 = derivative(axpy(s, 0.5 * h, k2));
    const ChainState k4 = derivative(axpy(s, h, k3));
    return {s.pp + h / 6.0 * (k1.pp + 2.0 * k2.pp + 2.0 * k3.pp + k4.pp),
            s.pb + h / 6.0 * (k1.pb + 2.0 * k2.pb + 2.0 * k3.pb + k4.pb)};
  }

 private:
  double g_, pe_, kd_, r_, f_, relax_;
  bool merged_;
};

}  // namespace detail

/// Classical RK4 from an all-zero state. Samples are kept every `stride`
/// steps plus the final time.
inline BuildupSeries simulate_buildup(const RateChainParams& params, double duration, double dt,
                                      std::size_t stride = 1) {
  params.validate();
  require(duration >= 0.0 && units::finite(duration), ErrorCode::InvalidParams,
          "duration must be non-negative");
  require(dt > 0.0, ErrorCode::InvalidParams, "dt must be positive");
  require(stride >= 1, ErrorCode::InvalidParams, "stride must be >= 1");
  require(dt <= params.max_step() * (1.0 + 1e-12), ErrorCode::StepTooCoarse,
          "dt " + std::to_string(dt) + " s exceeds min(1/G, 1/kappa_d, T1n)/10 = " +
              std::to_string(params.max_step()) + " s");

  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  const double h = steps > 0 ? duration / static_cast<double>(steps) : 0.0;
  const detail::ChainIntegrator chain(params);

  BuildupSeries out;
  const std::size_t reserve = steps / stride + 2;
  out.time.reserve(reserve);
  out.pe.reserve(reserve);
  out.pp.reserve(reserve);
  out.pb.reserve(reserve);
  auto record = [&](double t, const detail::ChainState& s) {
    out.time.push_back(t);
    out.pe.push_back(electron_polarization(t, params.kappa_e));
    out.pp.push_back(s.pp);
    out.pb.push_back(s.pb);
  };

  detail::ChainState s;
  record(0.0, s);
  for (std::size_t k = 1; k <= steps; ++k) {
    s = chain.step(s, h);
    if (k % stride == 0 || k == steps) record(h * static_cast<double>(k), s);
  }
  return out;
}

/// Bulk polarization at `duration` without storing the trajectory.
inline double buildup_endpoint(const RateChainParams& params, double duration, std::size_t steps) {
  params.validate();
  require(steps >= 1, ErrorCode::InvalidParams, "steps must be >= 1");
  const double h = duration / static_cast<double>(steps);
  require(h <= params.max_step() * (1.0 + 1e-12), ErrorCode::StepTooCoarse,
          "step exceeds min(1/G, 1/kappa_d, T1n)/10");
  const detail::ChainIntegrator chain(params);
  detail::ChainState s;
  for (std::size_t k = 0; k < steps; ++k) s = chain.step(s, h);
  return s.pb;
}

/// Least-squares slope of P_b(t) over [0, window] (polarization per second).
inline double small_time_injection_rate(const BuildupSeries& series, double window = 0.6) {
  require(window > 0.0, ErrorCode::InvalidParams, "window must be positive");
  std::vector<double> t, p;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.time[i] <= window * (1.0 + 1e-12)) {
      t.push_back(series.time[i]);
      p.push_back(series.pb[i]);
    }
  }
  require(t.size() >= 5, ErrorCode::InsufficientSamples,
          "fewer than 5 samples inside the linearization window");
  return ordinary_least_squares(t, p).slope;
}

/// Injection rate expressed in percent of a reference thermal polarization per second.
inline double injection_rate_percent(double slope, double reference = thermal_polarization_7t) {
  require(reference > 0.0, ErrorCode::InvalidParams, "reference polarization must be positive");
  return 100.0 * slope / reference;
}

/// Chain driven by the ratchet at a given sweep rate: gaps and pumping are
/// fixed, G(omega_r) = omega_r * per_sweep_polarization(T(eps1), T(eps2)).
struct BulkModel {
  RatchetParams ratchet;   // kappa_e, eps1, eps2, bandwidth, duration
  RateChainParams chain;   // kappa_d, t1n and pool sizes are used
  TunnelingLaw law = TunnelingLaw::Paper;

  RateChainParams at_rate(double omega_r) const {
    RateChainParams c = chain;
    c.kappa_e = ratchet.kappa_e;
    c.omega_r = omega_r;
    const double t1 = tunneling_probability(ratchet.eps1, omega_r, ratchet.bandwidth, law);
    const double t2 = tunneling_probability(ratchet.eps2, omega_r, ratchet.bandwidth, law);
    c.inj_rate = omega_r * per_sweep_polarization(t1, t2);
    return c;
  }

  /// Rate-independent step count: G <= c * eps2^2 / B for every omega_r
  /// (c = 1 for the paper law, pi^2 for the standard law).
  std::size_t steps() const {
    const double c = law == TunnelingLaw::Paper ? 1.0 : std::numbers::pi * std::numbers::pi;
    RateChainParams bound = chain;
    bound.inj_rate = c * ratchet.eps2 * ratchet.eps2 / ratchet.bandwidth;
    const double h = bound.max_step();
    return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(ratchet.duration / h)));
  }

  double bulk_polarization(double omega_r, std::size_t n_steps) const {
    if (ratchet.duration == 0.0) return 0.0;
    return buildup_endpoint(at_rate(omega_r), ratchet.duration, n_steps);
  }
};

inline BulkModel make_bulk_model(const SpinSystem& system, const DriveConfig& drive,
                                 double bandwidth, const RateChainParams& chain, double duration,
                                 TunnelingLaw law = TunnelingLaw::Paper) {
  const auto gaps = analytic_gaps(system, drive, 0);
  BulkModel m;
  m.ratchet = {drive.kappa_e(), gaps.eps1, gaps.eps2, bandwidth, duration};
  m.ratchet.validate();
  m.chain = chain;
  m.chain.validate();
  m.law = law;
  return m;
}

/// Simulated analogue of a measured sweep-rate profile: P_b(duration) per grid rate.
inline DnpProfile bulk_profile(const SpinSystem& system, const DriveConfig& drive,
                               double bandwidth, const std::vector<double>& omega_grid,
                               const RateChainParams& chain, double duration,
                               TunnelingLaw law = TunnelingLaw::Paper) {
  const BulkModel model = make_bulk_model(system, drive, bandwidth, chain, duration, law);
  const std::size_t n = model.steps();
  std::vector<double> signal;
  signal.reserve(omega_grid.size());
  for (double w : omega_grid) signal.push_back(model.bulk_polarization(w, n));
  return DnpProfile(omega_grid, std::move(signal),
                    {drive.eta_e(), drive.eta_r(), bandwidth, duration});
}

inline constexpr int bulk_opt_points_per_decade = 48;

/// Maximizer of the bulk endpoint over the sweep rate (log grid + golden section).
inline double bulk_omega_opt(const BulkModel& model, RateWindow window = {}) {
  const std::size_t n = model.steps();
  const auto best = maximize_on_log_grid(
      [&](double w) { return model.bulk_polarization(w, n); }, window.low, window.high,
      bulk_opt_points_per_decade);
  require(best.interior && best.value > 0.0, ErrorCode::NoInteriorMaximum,
          "bulk polarization is maximal on the search-window boundary");
  return best.x;
}

}  // namespace ratchet
