#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "ratchet/error.hpp"
#include "ratchet/units.hpp"

namespace ratchet {

struct ProfileMeta {
  double eta_e = 0.0;      // W
  double eta_r = 0.0;      // W
  double bandwidth = 0.0;  // Hz
  double duration = 0.0;   // s

  friend bool operator==(const ProfileMeta&, const ProfileMeta&) = default;
};

/// Sampled signal P(omega_r) with the drive settings it was taken at.
class DnpProfile {
 public:
  DnpProfile(std::vector<double> omega_r, std::vector<double> signal, ProfileMeta meta = {})
      : omega_r_(std::move(omega_r)), signal_(std::move(signal)), meta_(meta) {
    require(omega_r_.size() == signal_.size(), ErrorCode::InvalidParams,
            "omega_r and signal differ in length");
    require(omega_r_.size() >= 5, ErrorCode::InsufficientSamples,
            "a profile needs at least 5 points");
    for (std::size_t i = 0; i < omega_r_.size(); ++i) {
      require(units::finite(omega_r_[i]) && omega_r_[i] > 0.0, ErrorCode::InvalidParams,
              "omega_r values must be positive and finite");
      require(units::finite(signal_[i]), ErrorCode::InvalidParams, "signals must be finite");
      if (i > 0) {
        require(omega_r_[i] > omega_r_[i - 1], ErrorCode::InvalidParams,
                "omega_r must be strictly increasing");
      }
    }
  }

  std::size_t size() const noexcept { return omega_r_.size(); }
  const std::vector<double>& omega_r() const noexcept { return omega_r_; }
  const std::vector<double>& signal() const noexcept { return signal_; }
  const ProfileMeta& meta() const noexcept { return meta_; }

  std::size_t argmax() const {
    return static_cast<std::size_t>(std::max_element(signal_.begin(), signal_.end()) -
                                    signal_.begin());
  }

  friend bool operator==(const DnpProfile&, const DnpProfile&) = default;

 private:
  std::vector<double> omega_r_;
  std::vector<double> signal_;
  ProfileMeta meta_;
};

}  // namespace ratchet
