#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ratchet/error.hpp"
#include "ratchet/golden_section.hpp"
#include "ratchet/spin_system.hpp"

// Rotating-frame Hamiltonian on {m_s = 0, +1} x N nuclear spins and the
// Landau-Zener anti-crossing cascade it produces under a linear chirp.
//
// Basis index: i = m_s * 2^N + c, where bit j of c is 1 for nucleus j "up"
// (m_I = +1/2) along its quantization axis. In the m_s = 0 block that axis is
// z; in the m_s = +1 block the Hamiltonian's nuclear term is tilted by
// alpha_j = atan2(a_perp, omega_n + a_par), and the diabatic states of that
// manifold are products of the tilted eigenstates.
namespace ratchet {

using ComplexMatrix = Eigen::MatrixXcd;

class HermitianMatrix {
 public:
  explicit HermitianMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
    require(entries_.rows() == entries_.cols(), ErrorCode::InvalidParams,
            "Hermitian matrix must be square");
    const double scale = std::max(entries_.cwiseAbs().maxCoeff(), 1e-300);
    const double asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    require(asym <= 1e-12 * scale, ErrorCode::InvalidParams, "matrix is not Hermitian");
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const ComplexMatrix& matrix() const noexcept { return entries_; }
  std::complex<double> operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  Eigen::VectorXd eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(entries_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
  }

 private:
  ComplexMatrix entries_;
};

struct NuclearFrequencies {
  double omega0 = 0.0;  // m_s = 0 manifold
  double omega1 = 0.0;  // m_s = +1 manifold
};

inline const HyperfineCoupling& nucleus_at(const SpinSystem& system, std::size_t j) {
  require(j < system.nucleus_count(), ErrorCode::IndexOutOfRange,
          "nucleus index " + std::to_string(j) + " out of range");
  return system.nuclei()[j];
}

inline NuclearFrequencies nuclear_frequencies(const SpinSystem& system, std::size_t j) {
  const auto& hf = nucleus_at(system, j);
  const double wn = system.omega_n();
  NuclearFrequencies f;
  f.omega0 = wn + system.electron_zeeman() * hf.a_perp() / system.constants().delta_zfs();
  f.omega1 = std::hypot(wn + hf.a_par(), hf.a_perp());
  return f;
}

/// Tilt of the m_s = +1 nuclear quantization axis away from z.
inline double tilt_angle(const SpinSystem& system, std::size_t j) {
  const auto& hf = nucleus_at(system, j);
  return std::atan2(hf.a_perp(), system.omega_n() + hf.a_par());
}

/// Closed-form conditional gaps for one directly coupled nucleus:
/// eps1 ~ c_r eta_r, eps2 ~ 2 c_r eta_r a_perp / (omega_n + a_par).
struct ConditionalGaps {
  double eps1 = 0.0;
  double eps2 = 0.0;
};

inline ConditionalGaps analytic_gaps(const SpinSystem& system, const DriveConfig& drive,
                                     std::size_t j = 0) {
  const auto& hf = nucleus_at(system, j);
  const double denom = system.omega_n() + hf.a_par();
  require(denom > 0.0, ErrorCode::DomainError,
          "omega_n + a_par <= 0: conditional gap sign convention undefined");
  ConditionalGaps g;
  g.eps1 = drive.rabi();
  g.eps2 = 2.0 * drive.rabi() * hf.a_perp() / denom;
  return g;
}

namespace detail {

inline std::size_t nuclear_dim(std::size_t n) { return std::size_t{1} << n; }

inline int spin_sign(std::uint32_t config, std::size_t j) {
  return ((config >> j) & 1u) ? +1 : -1;
}

/// Columns: tilted product states of the m_s = +1 manifold in the z basis.
inline Eigen::MatrixXd tilted_basis(const std::vector<double>& tilts) {
  const std::size_t n = tilts.size();
  const std::size_t dim = nuclear_dim(n);
  Eigen::MatrixXd w(dim, dim);
  for (std::size_t row = 0; row < dim; ++row) {
    for (std::size_t col = 0; col < dim; ++col) {
      double v = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double c = std::cos(0.5 * tilts[j]);
        const double s = std::sin(0.5 * tilts[j]);
        const bool z_up = (row >> j) & 1u;
        const bool t_up = (col >> j) & 1u;
        // |up'> = s|down> + c|up>, |down'> = c|down> - s|up>
        if (t_up) v *= z_up ? c : s;
        else v *= z_up ? -s : c;
      }
      w(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = v;
    }
  }
  return w;
}

}  // namespace detail

/// H(omega_MW) split as base + delta * P1, so sweeping only touches the
/// diagonal of the m_s = +1 block. delta = resonance - omega_MW.
class SweptHamiltonian {
 public:
  SweptHamiltonian(const SpinSystem& system, const DriveConfig& drive)
      : nuclei_(system.nucleus_count()), resonance_(system.electron_resonance()) {
    const std::size_t nd = detail::nuclear_dim(nuclei_);
    const auto dim = static_cast<Eigen::Index>(2 * nd);
    base_ = ComplexMatrix::Zero(dim, dim);
    tilts_.resize(nuclei_);
    for (std::size_t j = 0; j < nuclei_; ++j) tilts_[j] = tilt_angle(system, j);

    const double half_rabi = 0.5 * drive.rabi();
    for (std::size_t c = 0; c < nd; ++c) {
      const auto i0 = static_cast<Eigen::Index>(c);
      const auto i1 = static_cast<Eigen::Index>(nd + c);
      base_(i0, i1) = half_rabi;
      base_(i1, i0) = half_rabi;
      for (std::size_t j = 0; j < nuclei_; ++j) {
        const auto f = nuclear_frequencies(system, j);
        const auto cfg = static_cast<std::uint32_t>(c);
        const double iz = 0.5 * detail::spin_sign(cfg, j);
        base_(i0, i0) += f.omega0 * iz;
        base_(i1, i1) += f.omega1 * std::cos(tilts_[j]) * iz;
        // I_x couples c with c ^ (1 << j), matrix element 1/2
        const auto flipped = static_cast<Eigen::Index>(nd + (c ^ (std::size_t{1} << j)));
        base_(i1, flipped) += f.omega1 * std::sin(tilts_[j]) * 0.5;
      }
    }
  }

  std::size_t nucleus_count() const noexcept { return nuclei_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(base_.rows()); }
  double resonance() const noexcept { return resonance_; }
  const std::vector<double>& tilts() const noexcept { return tilts_; }
  const ComplexMatrix& base() const noexcept { return base_; }

  double detuning(double omega_mw) const noexcept { return resonance_ - omega_mw; }

  void fill_at_detuning(double delta, ComplexMatrix& out) const {
    out = base_;
    const std::size_t nd = detail::nuclear_dim(nuclei_);
    for (std::size_t c = 0; c < nd; ++c) {
      const auto i1 = static_cast<Eigen::Index>(nd + c);
      out(i1, i1) += delta;
    }
  }

  ComplexMatrix at_frequency(double omega_mw) const {
    ComplexMatrix h;
    fill_at_detuning(detuning(omega_mw), h);
    return h;
  }

 private:
  std::size_t nuclei_;
  double resonance_;
  std::vector<double> tilts_;
  ComplexMatrix base_;
};

inline HermitianMatrix build_hamiltonian(const SpinSystem& system, const DriveConfig& drive,
                                         double omega_mw) {
  return HermitianMatrix(SweptHamiltonian(system, drive).at_frequency(omega_mw));
}

/// One Landau-Zener anti-crossing between the m_s = 0 diabatic state with
/// nuclear configuration ms0_config and the m_s = +1 diabatic state with
/// (tilted) configuration ms1_config.
struct Lac {
  double location = 0.0;  // microwave frequency at the crossing (Hz)
  double gap = 0.0;       // full minimum splitting (Hz)
  std::string branch_label;
  std::uint32_t ms0_config = 0;
  std::uint32_t ms1_config = 0;
  bool degenerate = false;  // vanishing gap: a true crossing
  int multiplicity = 1;     // >1 when several diabatic crossings merge

  bool conserving() const noexcept { return ms0_config == ms1_config; }
};

inline std::string branch_label(std::uint32_t ms0_config, std::uint32_t ms1_config,
                                std::size_t nuclei) {
  std::string label = "0:";
  for (std::size_t j = 0; j < nuclei; ++j) label += ((ms0_config >> j) & 1u) ? 'u' : 'd';
  label += "|1:";
  for (std::size_t j = 0; j < nuclei; ++j) label += ((ms1_config >> j) & 1u) ? 'u' : 'd';
  return label;
}

/// Anti-crossings ordered by location, i.e. in the order an up-chirp meets them.
class LacCascade {
 public:
  LacCascade() = default;
  LacCascade(std::size_t nuclei, std::vector<Lac> lacs) : nuclei_(nuclei), lacs_(std::move(lacs)) {
    const std::uint32_t limit = static_cast<std::uint32_t>(detail::nuclear_dim(nuclei));
    for (const auto& lac : lacs_) {
      require(units::finite(lac.location), ErrorCode::InvalidParams, "LAC location must be finite");
      require(units::finite(lac.gap) && lac.gap >= 0.0, ErrorCode::InvalidParams,
              "LAC gap must be non-negative");
      require(lac.ms0_config < limit && lac.ms1_config < limit, ErrorCode::InvalidParams,
              "LAC configuration out of range");
    }
    std::stable_sort(lacs_.begin(), lacs_.end(),
                     [](const Lac& a, const Lac& b) { return a.location < b.location; });
  }

  std::size_t nucleus_count() const noexcept { return nuclei_; }
  std::size_t size() const noexcept { return lacs_.size(); }
  bool empty() const noexcept { return lacs_.empty(); }
  const std::vector<Lac>& lacs() const noexcept { return lacs_; }
  const Lac& operator[](std::size_t i) const { return lacs_.at(i); }
  auto begin() const noexcept { return lacs_.begin(); }
  auto end() const noexcept { return lacs_.end(); }

 private:
  std::size_t nuclei_ = 0;
  std::vector<Lac> lacs_;
};

/// Diabatic prediction of all 2^(2N) crossings: locations where the
/// uncoupled levels meet, gaps from the first-order coupling
/// Omega_e * |<c0|c1'>|. This is the Hamiltonian's own closed form and is
/// what the numerical scan is checked against.
inline LacCascade predict_lacs(const SpinSystem& system, const DriveConfig& drive) {
  const std::size_t n = system.nucleus_count();
  const std::size_t nd = detail::nuclear_dim(n);
  std::vector<double> w0(n), w1(n), tilts(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto f = nuclear_frequencies(system, j);
    w0[j] = f.omega0;
    w1[j] = f.omega1;
    tilts[j] = tilt_angle(system, j);
  }
  const Eigen::MatrixXd overlap = detail::tilted_basis(tilts);
  std::vector<Lac> lacs;
  lacs.reserve(nd * nd);
  for (std::uint32_t c0 = 0; c0 < nd; ++c0) {
    double e0 = 0.0;
    for (std::size_t j = 0; j < n; ++j) e0 += 0.5 * w0[j] * detail::spin_sign(c0, j);
    for (std::uint32_t c1 = 0; c1 < nd; ++c1) {
      double e1 = 0.0;
      for (std::size_t j = 0; j < n; ++j) e1 += 0.5 * w1[j] * detail::spin_sign(c1, j);
      Lac lac;
      lac.location = system.electron_resonance() - (e0 - e1);
      lac.gap = drive.rabi() * std::abs(overlap(c0, c1));
      lac.ms0_config = c0;
      lac.ms1_config = c1;
      lac.branch_label = branch_label(c0, c1, n);
      lac.degenerate = lac.gap == 0.0;
      lacs.push_back(std::move(lac));
    }
  }
  return LacCascade(n, std::move(lacs));
}

struct LacScanOptions {
  std::size_t samples = 4096;
  double min_mixing = 0.2;  // both eigenvectors need this much m_s = +1 weight at the minimum
};

/// Numerical cascade: scan omega_MW over the sweep window, take local minima
/// of adjacent eigenvalue differences, refine each by golden section and keep
/// those whose eigenvectors are genuinely mixed between the two manifolds.
inline LacCascade locate_lacs(const SpinSystem& system, const DriveConfig& drive,
                              const SweepConfig& sweep, const LacScanOptions& options = {}) {
  const std::size_t n = system.nucleus_count();
  require(n >= 1, ErrorCode::InvalidSystem, "locate_lacs needs at least one nucleus");
  require(options.samples >= 3, ErrorCode::InvalidParams, "scan needs at least 3 samples");
  const SweptHamiltonian ham(system, drive);
  const std::size_t nd = detail::nuclear_dim(n);
  const std::size_t dim = ham.dim();
  const double lo = sweep.window_low();
  const double spacing = sweep.bandwidth() / static_cast<double>(options.samples - 1);
  const Eigen::MatrixXd tilted = detail::tilted_basis(ham.tilts());

  ComplexMatrix h;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(static_cast<Eigen::Index>(dim));
  auto eigenvalues_at = [&](double offset) {
    ham.fill_at_detuning(ham.detuning(lo + offset), h);
    solver.compute(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
  };

  const std::size_t m = options.samples;
  Eigen::MatrixXd levels(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < m; ++i) {
    levels.row(static_cast<Eigen::Index>(i)) =
        eigenvalues_at(spacing * static_cast<double>(i)).transpose();
  }

  const LacCascade predicted = predict_lacs(system, drive);
  const double degenerate_tol = 1e-7 * sweep.bandwidth();

  struct Weights {
    double ms1 = 0.0;
    Eigen::VectorXd w0, w1;
  };
  auto manifold_weights = [&](const Eigen::VectorXcd& v) {
    Weights w;
    const auto ndi = static_cast<Eigen::Index>(nd);
    w.w0 = v.head(ndi).cwiseAbs2();
    const Eigen::VectorXcd t = tilted.transpose().cast<std::complex<double>>() * v.tail(ndi);
    w.w1 = t.cwiseAbs2();
    w.ms1 = w.w1.sum();
    return w;
  };
  auto dominant = [](const Eigen::VectorXd& a) {
    Eigen::Index idx = 0;
    a.maxCoeff(&idx);
    return static_cast<std::uint32_t>(idx);
  };

  std::vector<Lac> found;
  for (std::size_t k = 0; k + 1 < dim; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    auto diff = [&](std::size_t i) {
      const auto ii = static_cast<Eigen::Index>(i);
      return levels(ii, kk + 1) - levels(ii, kk);
    };
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double d = diff(i);
      if (!(d < diff(i - 1) && d <= diff(i + 1))) continue;
      const double a = spacing * static_cast<double>(i - 1);
      const double b = spacing * static_cast<double>(i + 1);
      const double offset = golden_section_minimize(
          [&](double u) {
            const auto ev = eigenvalues_at(u);
            return ev(kk + 1) - ev(kk);
          },
          a, b, 1e-14, 200);
      const auto ev = eigenvalues_at(offset);
      const double gap = ev(kk + 1) - ev(kk);

      Lac lac;
      lac.location = lo + offset;
      lac.gap = gap;
      if (gap < degenerate_tol) {
        // True crossing: label from the unmixed eigenvectors one grid step away.
        ham.fill_at_detuning(ham.detuning(lo + a), h);
        solver.compute(h);
        const auto wa = manifold_weights(solver.eigenvectors().col(kk));
        const auto wb = manifold_weights(solver.eigenvectors().col(kk + 1));
        const bool a_is_ms1 = wa.ms1 > 0.5;
        if (a_is_ms1 == (wb.ms1 > 0.5)) continue;
        const auto& w_ms0 = a_is_ms1 ? wb : wa;
        const auto& w_ms1 = a_is_ms1 ? wa : wb;
        lac.ms0_config = dominant(w_ms0.w0);
        lac.ms1_config = dominant(w_ms1.w1);
        lac.degenerate = true;
        lac.gap = 0.0;
      } else {
        ham.fill_at_detuning(ham.detuning(lac.location), h);
        solver.compute(h);
        const auto wa = manifold_weights(solver.eigenvectors().col(kk));
        const auto wb = manifold_weights(solver.eigenvectors().col(kk + 1));
        const double hi_mix = 1.0 - options.min_mixing;
        if (wa.ms1 < options.min_mixing || wa.ms1 > hi_mix || wb.ms1 < options.min_mixing ||
            wb.ms1 > hi_mix) {
          continue;
        }
        lac.ms0_config = dominant(wa.w0 + wb.w0);
        lac.ms1_config = dominant(wa.w1 + wb.w1);
      }
      lac.branch_label = branch_label(lac.ms0_config, lac.ms1_config, n);
      found.push_back(std::move(lac));
    }
  }
  require(!found.empty(), ErrorCode::NoCrossingInBandwidth,
          "no anti-crossing found inside the sweep window");

  // Diabatic crossings without a labelled match were merged into the nearest located one.
  for (const auto& p : predicted) {
    if (p.location < sweep.window_low() || p.location > sweep.window_high()) continue;
    const bool matched = std::any_of(found.begin(), found.end(), [&](const Lac& l) {
      return l.ms0_config == p.ms0_config && l.ms1_config == p.ms1_config;
    });
    if (matched) continue;
    auto nearest = std::min_element(found.begin(), found.end(), [&](const Lac& a, const Lac& b) {
      return std::abs(a.location - p.location) < std::abs(b.location - p.location);
    });
    ++nearest->multiplicity;
  }
  return LacCascade(n, std::move(found));
}

}  // namespace ratchet
