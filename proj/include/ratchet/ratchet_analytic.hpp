#pragma once

#include <cmath>
#include <string>

#include "ratchet/error.hpp"
#include "ratchet/golden_section.hpp"
#include "ratchet/units.hpp"

namespace ratchet {

/// Paper: T = exp(-eps^2 / (omega_r B)).
/// Standard: textbook Landau-Zener passage for a full gap eps at chirp B*omega_r.
enum class TunnelingLaw { Paper, Standard };

inline const char* to_string(TunnelingLaw law) noexcept {
  return law == TunnelingLaw::Paper ? "paper" : "standard";
}

inline TunnelingLaw parse_tunneling_law(const std::string& s) {
  if (s == "paper") return TunnelingLaw::Paper;
  if (s == "standard") return TunnelingLaw::Standard;
  throw Error(ErrorCode::ConfigError, "unknown tunneling law '" + s + "' (paper|standard)");
}

/// Diabatic passage probability exp(-2 pi (w/2)^2 / v) with the full gap and
/// the chirp converted to angular units, i.e. exp(-pi^2 eps^2 / v) in Hz.
inline double lz_reference_probability(double eps, double sweep_velocity) {
  require(sweep_velocity > 0.0, ErrorCode::DomainError, "sweep velocity must be positive");
  const double half_gap = 0.5 * units::to_angular(eps);
  return std::exp(-units::two_pi * half_gap * half_gap / units::to_angular(sweep_velocity));
}

inline double tunneling_probability(double eps, double omega_r, double bandwidth,
                                    TunnelingLaw law = TunnelingLaw::Paper) {
  require(omega_r > 0.0 && bandwidth > 0.0, ErrorCode::DomainError,
          "tunneling probability needs omega_r > 0 and bandwidth > 0");
  if (law == TunnelingLaw::Standard) return lz_reference_probability(eps, omega_r * bandwidth);
  return std::exp(-eps * eps / (omega_r * bandwidth));
}

struct RatchetParams {
  double kappa_e = 0.0;    // c_e * eta_e (1/s)
  double eps1 = 0.0;       // large gap (Hz)
  double eps2 = 0.0;       // small gap (Hz)
  double bandwidth = 0.0;  // B (Hz)
  double duration = 0.0;   // T (s)

  void validate() const {
    auto check = [](double v, const char* name) {
      require(units::finite(v) && v >= 0.0, ErrorCode::InvalidParams,
              std::string(name) + " must be finite and non-negative");
    };
    check(kappa_e, "kappa_e");
    check(eps1, "eps1");
    check(eps2, "eps2");
    check(duration, "duration");
    require(units::finite(bandwidth) && bandwidth > 0.0, ErrorCode::InvalidParams,
            "bandwidth must be positive");
  }

  bool gap_order_suspect() const noexcept { return eps2 > eps1; }

  friend bool operator==(const RatchetParams&, const RatchetParams&) = default;
};

/// Per-sweep nuclear transition probabilities; rows are the initial state.
struct SweepTransitionMatrix {
  double down_down = 1.0;
  double down_up = 0.0;
  double up_down = 0.0;
  double up_up = 1.0;

  double row_sum_down() const noexcept { return down_down + down_up; }
  double row_sum_up() const noexcept { return up_down + up_up; }
  /// Down population gained minus up population, starting unpolarized.
  double column_difference() const noexcept {
    return (down_down + up_down) - (down_up + up_up);
  }
};

inline void require_probability(double p, const char* name) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::DomainError,
          std::string(name) + " must lie in [0, 1]");
}

inline SweepTransitionMatrix sweep_transition_matrix(double t1, double t2) {
  require_probability(t1, "t1");
  require_probability(t2, "t2");
  SweepTransitionMatrix m;
  m.down_down = (1.0 - t2) + t2 * t1;
  m.down_up = t2 * (1.0 - t1);
  m.up_down = t2 * (1.0 - t1) + 2.0 * t1 * (1.0 - t1) * (1.0 - t2);
  m.up_up = t1 * t2 + t1 * t1 * (1.0 - t2) + (1.0 - t1) * (1.0 - t1) * (1.0 - t2);
  return m;
}

inline double per_sweep_polarization(double t1, double t2) {
  require_probability(t1, "t1");
  require_probability(t2, "t2");
  return (1.0 - t2) * 4.0 * t1 * (1.0 - t1);
}

/// 1 - exp(-kappa_e / omega_r), the electron polarization available per sweep.
inline double electron_bracket(double kappa_e, double omega_r) {
  return -std::expm1(-kappa_e / omega_r);
}

/// Polarization buildup rate per second at sweep rate omega_r.
inline double buildup_rate(double omega_r, const RatchetParams& p,
                           TunnelingLaw law = TunnelingLaw::Paper) {
  require(omega_r > 0.0, ErrorCode::DomainError, "omega_r must be positive");
  const double t1 = tunneling_probability(p.eps1, omega_r, p.bandwidth, law);
  const double t2 = tunneling_probability(p.eps2, omega_r, p.bandwidth, law);
  return omega_r * electron_bracket(p.kappa_e, omega_r) * per_sweep_polarization(t1, t2);
}

/// Polarization after T * omega_r sweeps (linear in sweep count, no saturation).
inline double total_polarization(const RatchetParams& p, double omega_r,
                                 TunnelingLaw law = TunnelingLaw::Paper) {
  return buildup_rate(omega_r, p, law) * p.duration;
}

struct RateWindow {
  double low = 1.0;
  double high = 1e6;
};

inline constexpr int omega_opt_points_per_decade = 256;

inline double find_omega_opt(const RatchetParams& p, RateWindow window = {},
                             TunnelingLaw law = TunnelingLaw::Paper) {
  p.validate();
  require(window.low > 0.0 && window.high > window.low, ErrorCode::InvalidParams,
          "search window must satisfy 0 < low < high");
  const auto best = maximize_on_log_grid([&](double w) { return buildup_rate(w, p, law); },
                                         window.low, window.high, omega_opt_points_per_decade);
  require(best.interior && best.value > 0.0, ErrorCode::NoInteriorMaximum,
          "buildup rate is maximal on the search-window boundary");
  return best.x;
}

}  // namespace ratchet
