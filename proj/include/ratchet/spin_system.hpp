#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ratchet/error.hpp"
#include "ratchet/units.hpp"

namespace ratchet {

/// Gyromagnetic ratios (Hz/T) and the NV zero-field splitting (Hz).
class PhysicalConstants {
 public:
  PhysicalConstants() : PhysicalConstants(units::electron_gyromagnetic_ratio,
                                          units::carbon13_gyromagnetic_ratio,
                                          units::nv_zero_field_splitting) {}

  PhysicalConstants(double gamma_e, double gamma_n, double delta_zfs)
      : gamma_e_(gamma_e), gamma_n_(gamma_n), delta_zfs_(delta_zfs) {
    require(units::finite(gamma_e) && gamma_e > 0.0, ErrorCode::InvalidSystem,
            "gamma_e must be positive and finite");
    require(units::finite(gamma_n) && gamma_n > 0.0, ErrorCode::InvalidSystem,
            "gamma_n must be positive and finite");
    require(gamma_e / gamma_n > 2000.0, ErrorCode::InvalidSystem,
            "gamma_e / gamma_n must exceed 2000");
    require(units::finite(delta_zfs) && delta_zfs > 0.0, ErrorCode::InvalidSystem,
            "delta_zfs must be positive and finite");
  }

  double gamma_e() const noexcept { return gamma_e_; }
  double gamma_n() const noexcept { return gamma_n_; }
  double delta_zfs() const noexcept { return delta_zfs_; }

  friend bool operator==(const PhysicalConstants&, const PhysicalConstants&) = default;

 private:
  double gamma_e_;
  double gamma_n_;
  double delta_zfs_;
};

/// Hyperfine coupling of one nucleus to the NV electron, split along and
/// across the NV axis. a_par is signed, a_perp is a magnitude.
class HyperfineCoupling {
 public:
  HyperfineCoupling(double a_par, double a_perp) : a_par_(a_par), a_perp_(a_perp) {
    require(units::finite(a_par), ErrorCode::InvalidSystem, "a_par must be finite");
    require(units::finite(a_perp) && a_perp >= 0.0, ErrorCode::InvalidSystem,
            "a_perp must be finite and non-negative");
  }

  double a_par() const noexcept { return a_par_; }
  double a_perp() const noexcept { return a_perp_; }

  friend bool operator==(const HyperfineCoupling&, const HyperfineCoupling&) = default;

 private:
  double a_par_;
  double a_perp_;
};

/// Electron plus N hyperfine-coupled spin-1/2 nuclei in a static field.
class SpinSystem {
 public:
  static constexpr std::size_t default_exact_cap = 6;

  SpinSystem(PhysicalConstants constants, double b0, std::vector<HyperfineCoupling> nuclei,
             std::size_t exact_cap = default_exact_cap)
      : constants_(constants), b0_(b0), nuclei_(std::move(nuclei)), exact_cap_(exact_cap) {
    require(units::finite(b0) && b0 > 0.0, ErrorCode::InvalidSystem, "b0 must be positive");
    require(nuclei_.size() <= 24, ErrorCode::InvalidSystem,
            "more than 24 nuclei cannot be indexed by the cascade");
  }

  SpinSystem(double b0, std::vector<HyperfineCoupling> nuclei)
      : SpinSystem(PhysicalConstants{}, b0, std::move(nuclei)) {}

  const PhysicalConstants& constants() const noexcept { return constants_; }
  double b0() const noexcept { return b0_; }
  const std::vector<HyperfineCoupling>& nuclei() const noexcept { return nuclei_; }
  std::size_t nucleus_count() const noexcept { return nuclei_.size(); }
  std::size_t exact_cap() const noexcept { return exact_cap_; }

  /// Bare nuclear Larmor frequency gamma_n * B0.
  double omega_n() const noexcept { return constants_.gamma_n() * b0_; }

  /// Electron Zeeman frequency gamma_e * B0.
  double electron_zeeman() const noexcept { return constants_.gamma_e() * b0_; }

  /// Frequency of the driven m_s = 0 <-> +1 transition, Delta - gamma_e * B0.
  double electron_resonance() const noexcept {
    return constants_.delta_zfs() - electron_zeeman();
  }

  friend bool operator==(const SpinSystem&, const SpinSystem&) = default;

 private:
  PhysicalConstants constants_;
  double b0_;
  std::vector<HyperfineCoupling> nuclei_;
  std::size_t exact_cap_;
};

/// Optical and microwave powers (W) with their conversion factors.
class DriveConfig {
 public:
  DriveConfig(double eta_e, double eta_r, double c_e, double c_r)
      : eta_e_(eta_e), eta_r_(eta_r), c_e_(c_e), c_r_(c_r) {
    auto check = [](double v, const char* name) {
      require(units::finite(v) && v >= 0.0, ErrorCode::InvalidDrive,
              std::string(name) + " must be finite and non-negative");
    };
    check(eta_e, "eta_e");
    check(eta_r, "eta_r");
    check(c_e, "c_e");
    check(c_r, "c_r");
  }

  double eta_e() const noexcept { return eta_e_; }
  double eta_r() const noexcept { return eta_r_; }
  double c_e() const noexcept { return c_e_; }
  double c_r() const noexcept { return c_r_; }

  /// Optical pumping rate kappa_e = c_e * eta_e.
  double kappa_e() const noexcept { return c_e_ * eta_e_; }
  /// Electron Rabi frequency Omega_e = c_r * eta_r.
  double rabi() const noexcept { return c_r_ * eta_r_; }

  DriveConfig with_powers(double eta_e, double eta_r) const {
    return DriveConfig(eta_e, eta_r, c_e_, c_r_);
  }

  friend bool operator==(const DriveConfig&, const DriveConfig&) = default;

 private:
  double eta_e_;
  double eta_r_;
  double c_e_;
  double c_r_;
};

/// Linear chirp repeated at omega_r sweeps per second over [f0 - B/2, f0 + B/2].
class SweepConfig {
 public:
  SweepConfig(double f0, double bandwidth, double omega_r, double duration)
      : f0_(f0), bandwidth_(bandwidth), omega_r_(omega_r), duration_(duration) {
    require(units::finite(f0), ErrorCode::InvalidSweep, "f0 must be finite");
    require(units::finite(bandwidth) && bandwidth > 0.0, ErrorCode::InvalidSweep,
            "bandwidth must be positive");
    require(units::finite(omega_r) && omega_r > 0.0, ErrorCode::InvalidSweep,
            "omega_r must be positive");
    require(units::finite(duration) && duration >= 0.0, ErrorCode::InvalidSweep,
            "duration must be non-negative");
  }

  double f0() const noexcept { return f0_; }
  double bandwidth() const noexcept { return bandwidth_; }
  double omega_r() const noexcept { return omega_r_; }
  double duration() const noexcept { return duration_; }

  double period() const noexcept { return 1.0 / omega_r_; }
  double window_low() const noexcept { return f0_ - 0.5 * bandwidth_; }
  double window_high() const noexcept { return f0_ + 0.5 * bandwidth_; }
  /// Chirp velocity d omega_MW / dt = B * omega_r (Hz/s).
  double velocity() const noexcept { return bandwidth_ * omega_r_; }
  double sweep_count() const noexcept { return duration_ * omega_r_; }

  /// Instantaneous microwave frequency; t is folded into the current sweep.
  double frequency_at(double t) const noexcept {
    const double in_sweep = t - std::floor(t * omega_r_) * period();
    return bandwidth_ * omega_r_ * in_sweep + f0_ - 0.5 * bandwidth_;
  }

  SweepConfig with_rate(double omega_r) const {
    return SweepConfig(f0_, bandwidth_, omega_r, duration_);
  }

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;

 private:
  double f0_;
  double bandwidth_;
  double omega_r_;
  double duration_;
};

struct ValidationReport {
  bool passed = true;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
};

/// Cross-checks a constructed system/drive/sweep triple. Field-level
/// constraints are already enforced by the constructors; this looks at the
/// combinations that make the sequential-crossing picture questionable.
inline ValidationReport validate_system(const SpinSystem& system, const DriveConfig& drive,
                                        const SweepConfig& sweep) {
  ValidationReport report;
  const double eps1 = drive.rabi();
  if (sweep.bandwidth() <= 10.0 * eps1) {
    report.warnings.push_back(
        "adiabatic-approximation suspect: bandwidth " + std::to_string(sweep.bandwidth()) +
        " Hz is not larger than 10 * eps1 = " + std::to_string(10.0 * eps1) + " Hz");
  }
  if (system.nucleus_count() > system.exact_cap()) {
    report.warnings.push_back("nucleus count " + std::to_string(system.nucleus_count()) +
                              " exceeds the exact-propagation cap " +
                              std::to_string(system.exact_cap()));
  }
  const double resonance = system.electron_resonance();
  if (resonance < sweep.window_low() || resonance > sweep.window_high()) {
    report.warnings.push_back(
        "electron resonance " + std::to_string(resonance) +
        " Hz lies outside the sweep window; the cascade cannot be scanned numerically");
  }
  for (std::size_t j = 0; j < system.nucleus_count(); ++j) {
    const auto& hf = system.nuclei()[j];
    const double denom = system.omega_n() + hf.a_par();
    if (denom <= 0.0) {
      report.warnings.push_back("nucleus " + std::to_string(j) +
                                ": omega_n + a_par <= 0, conditional-gap sign is ambiguous");
    } else if (2.0 * hf.a_perp() >= denom) {
      report.warnings.push_back("nucleus " + std::to_string(j) +
                                ": 2 a_perp >= omega_n + a_par, eps2 is not below eps1");
    }
  }
  return report;
}

}  // namespace ratchet
