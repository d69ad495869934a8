#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ratchet/counter_rng.hpp"
#include "ratchet/error.hpp"
#include "ratchet/lz_cascade.hpp"
#include "ratchet/ratchet_analytic.hpp"
#include "ratchet/spin_system.hpp"

namespace ratchet {

/// Electron repolarization applied at the start of every sweep.
/// Full puts the electron in m_s = 0; Partial(p) uses populations
/// (1 + p)/2 in m_s = 0 and (1 - p)/2 in m_s = +1.
struct ResetMode {
  enum class Kind { Full, Partial };
  Kind kind = Kind::Full;
  double p_e = 1.0;

  static ResetMode full() { return {}; }
  static ResetMode partial(double p_e) {
    require(p_e >= 0.0 && p_e <= 1.0, ErrorCode::InvalidParams, "p_e must lie in [0, 1]");
    return {Kind::Partial, p_e};
  }

  double polarization() const noexcept { return kind == Kind::Full ? 1.0 : p_e; }

  friend bool operator==(const ResetMode&, const ResetMode&) = default;
};

struct PropagationPolicy {
  std::size_t steps_per_sweep = 1000;
  ResetMode reset_mode{};
  std::size_t sweeps = 1;
  /// Initial <sigma_z> of every nucleus (product state, +1 is fully up).
  double initial_polarization = 0.0;
  /// Subdivide steps 4x within +-20 gaps of each predicted anti-crossing.
  bool refine_near_lacs = true;

  void validate() const {
    require(steps_per_sweep >= 1, ErrorCode::InvalidParams, "steps_per_sweep must be >= 1");
    require(sweeps >= 1, ErrorCode::InvalidParams, "sweeps must be >= 1");
    require(std::abs(initial_polarization) <= 1.0, ErrorCode::InvalidParams,
            "initial_polarization must lie in [-1, 1]");
    require(reset_mode.p_e >= 0.0 && reset_mode.p_e <= 1.0, ErrorCode::InvalidParams,
            "p_e must lie in [0, 1]");
  }
};

/// Per-sweep observables. Nuclear values use the +-1 normalization
/// (<sigma_z>), so an up nucleus reads +1.
struct SweepObservables {
  std::vector<double> iz;            // <sigma_z,j> in the lab z basis
  std::vector<double> iz_ms0;        // <P0 sigma_z,j>
  std::vector<double> iz_prime_ms1;  // <P1 sigma_z',j>, tilted axis of the m_s = +1 manifold
  double ms1_population = 0.0;
  double trace_drift = 0.0;
  double min_eigenvalue = 0.0;
};

struct NuclearPolarizationRecord {
  std::size_t nucleus_count = 0;
  std::size_t steps = 0;  // time steps actually used per sweep
  std::vector<SweepObservables> sweeps;
};

namespace detail {

inline constexpr double max_step_phase = 0.5;  // rad

/// Sweep-frequency step boundaries, uniform with optional local refinement.
inline std::vector<double> sweep_grid(double lo, double hi, std::size_t steps,
                                      const std::vector<std::pair<double, double>>& zones) {
  std::vector<double> edges;
  edges.reserve(steps + 1);
  const double h = (hi - lo) / static_cast<double>(steps);
  edges.push_back(lo);
  for (std::size_t i = 0; i < steps; ++i) {
    const double a = lo + h * static_cast<double>(i);
    const double b = (i + 1 == steps) ? hi : lo + h * static_cast<double>(i + 1);
    const bool refine = std::any_of(zones.begin(), zones.end(), [&](const auto& z) {
      return b > z.first && a < z.second;
    });
    if (refine) {
      for (int k = 1; k < 4; ++k) edges.push_back(a + 0.25 * k * (b - a));
    }
    edges.push_back(b);
  }
  return edges;
}

inline Eigen::MatrixXcd nuclear_reduced(const Eigen::MatrixXcd& rho, Eigen::Index nd) {
  return rho.topLeftCorner(nd, nd) + rho.bottomRightCorner(nd, nd);
}

inline Eigen::MatrixXcd with_electron_reset(const Eigen::MatrixXcd& rho_n, double p_e) {
  const Eigen::Index nd = rho_n.rows();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2 * nd, 2 * nd);
  rho.topLeftCorner(nd, nd) = 0.5 * (1.0 + p_e) * rho_n;
  rho.bottomRightCorner(nd, nd) = 0.5 * (1.0 - p_e) * rho_n;
  return rho;
}

inline Eigen::MatrixXcd product_nuclear_state(std::size_t n, double polarization) {
  const std::size_t nd = nuclear_dim(n);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nd),
                                                static_cast<Eigen::Index>(nd));
  for (std::uint32_t c = 0; c < nd; ++c) {
    double p = 1.0;
    for (std::size_t j = 0; j < n; ++j) p *= 0.5 * (1.0 + polarization * spin_sign(c, j));
    rho(c, c) = p;
  }
  return rho;
}

}  // namespace detail

/// Smallest uniform step count that keeps the per-step phase under 0.5 rad.
inline std::size_t required_steps_per_sweep(const SpinSystem& system, const DriveConfig& drive,
                                            const SweepConfig& sweep) {
  const SweptHamiltonian ham(system, drive);
  double radius = 0.0;
  for (double w : {sweep.window_low(), sweep.window_high()}) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(ham.at_frequency(w),
                                                        Eigen::EigenvaluesOnly);
    radius = std::max(radius, solver.eigenvalues().cwiseAbs().maxCoeff());
  }
  const double phase_per_sweep = units::two_pi * radius * sweep.period();
  return static_cast<std::size_t>(std::ceil(phase_per_sweep / detail::max_step_phase));
}

namespace detail {

inline constexpr std::size_t reunitarize_every = 1024;

/// Step loop, templated so that small systems use fixed-size matrices.
template <class Matrix>
ComplexMatrix accumulate_sweep(const SweptHamiltonian& ham, const std::vector<double>& edges,
                               double velocity, double& worst_phase) {
  const auto dim = static_cast<Eigen::Index>(ham.dim());
  ComplexMatrix h_dyn;
  Matrix h(dim, dim);
  Matrix u = Matrix::Identity(dim, dim);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(dim);
  worst_phase = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double mid = 0.5 * (edges[k] + edges[k + 1]);
    const double dt = (edges[k + 1] - edges[k]) / velocity;
    ham.fill_at_detuning(ham.detuning(mid), h_dyn);
    h = h_dyn;
    solver.compute(h);
    const auto& lambda = solver.eigenvalues();
    worst_phase = std::max(worst_phase, units::two_pi * lambda.cwiseAbs().maxCoeff() * dt);
    if (worst_phase > max_step_phase) break;
    Eigen::Matrix<std::complex<double>, Matrix::RowsAtCompileTime, 1> ph(dim);
    for (Eigen::Index i = 0; i < dim; ++i) ph(i) = std::polar(1.0, -units::two_pi * dt * lambda(i));
    const Matrix step = solver.eigenvectors() * ph.asDiagonal() * solver.eigenvectors().adjoint();
    u = (step * u).eval();
    if ((k + 1) % reunitarize_every == 0) {
      // One Newton-Schulz sweep towards the nearest unitary.
      const Matrix id = Matrix::Identity(dim, dim);
      u = (0.5 * u * (3.0 * id - u.adjoint() * u)).eval();
    }
  }
  return u;
}

}  // namespace detail

/// Propagator of one full chirp across the window, H piecewise constant at
/// each step midpoint and each step exponentiated exactly.
inline ComplexMatrix single_sweep_unitary(const SpinSystem& system, const DriveConfig& drive,
                                          const SweepConfig& sweep,
                                          const PropagationPolicy& policy,
                                          std::size_t* steps_used = nullptr) {
  policy.validate();
  const SweptHamiltonian ham(system, drive);
  std::vector<std::pair<double, double>> zones;
  if (policy.refine_near_lacs && system.nucleus_count() > 0) {
    for (const auto& lac : predict_lacs(system, drive)) {
      if (lac.gap > 0.0) {
        zones.emplace_back(lac.location - 20.0 * lac.gap, lac.location + 20.0 * lac.gap);
      }
    }
  } else if (policy.refine_near_lacs && drive.rabi() > 0.0) {
    const double r = system.electron_resonance();
    zones.emplace_back(r - 20.0 * drive.rabi(), r + 20.0 * drive.rabi());
  }
  const auto edges =
      detail::sweep_grid(sweep.window_low(), sweep.window_high(), policy.steps_per_sweep, zones);
  double phase = 0.0;
  ComplexMatrix u;
  switch (ham.dim()) {
    case 2:
      u = detail::accumulate_sweep<Eigen::Matrix2cd>(ham, edges, sweep.velocity(), phase);
      break;
    case 4:
      u = detail::accumulate_sweep<Eigen::Matrix4cd>(ham, edges, sweep.velocity(), phase);
      break;
    default:
      u = detail::accumulate_sweep<ComplexMatrix>(ham, edges, sweep.velocity(), phase);
  }
  require(phase <= detail::max_step_phase, ErrorCode::StepTooCoarse,
          "per-step phase " + std::to_string(phase) + " rad exceeds 0.5 rad; use at least " +
              std::to_string(required_steps_per_sweep(system, drive, sweep)) +
              " steps per sweep");
  if (steps_used) *steps_used = edges.size() - 1;
  return u;
}

inline SweepObservables measure(const Eigen::MatrixXcd& rho, std::size_t n,
                                const std::vector<double>& tilts) {
  const std::size_t nd = detail::nuclear_dim(n);
  const auto ndi = static_cast<Eigen::Index>(nd);
  SweepObservables obs;
  obs.iz.assign(n, 0.0);
  obs.iz_ms0.assign(n, 0.0);
  obs.iz_prime_ms1.assign(n, 0.0);
  const Eigen::MatrixXcd rho1 = rho.bottomRightCorner(ndi, ndi);
  const Eigen::MatrixXcd w = detail::tilted_basis(tilts).cast<std::complex<double>>();
  const Eigen::MatrixXcd rho1_tilted = w.adjoint() * rho1 * w;
  for (std::uint32_t c = 0; c < nd; ++c) {
    const double p0 = rho(c, c).real();
    const double p1 = rho1(c, c).real();
    const double p1t = rho1_tilted(c, c).real();
    for (std::size_t j = 0; j < n; ++j) {
      const int s = detail::spin_sign(c, j);
      obs.iz[j] += s * (p0 + p1);
      obs.iz_ms0[j] += s * p0;
      obs.iz_prime_ms1[j] += s * p1t;
    }
  }
  obs.ms1_population = rho1.trace().real();
  obs.trace_drift = std::abs(rho.trace() - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
  obs.min_eigenvalue = solver.eigenvalues().minCoeff();
  return obs;
}

/// Repeated sweeps of the exact Hamiltonian. The electron is reset at the
/// start of every sweep; the nuclear reduced state carries over.
inline NuclearPolarizationRecord propagate_sweep(const SpinSystem& system, const DriveConfig& drive,
                                                 const SweepConfig& sweep,
                                                 const PropagationPolicy& policy) {
  policy.validate();
  const std::size_t n = system.nucleus_count();
  require(n <= system.exact_cap(), ErrorCode::InvalidSystem,
          "nucleus count exceeds the exact-propagation cap");
  NuclearPolarizationRecord record;
  record.nucleus_count = n;
  const ComplexMatrix u = single_sweep_unitary(system, drive, sweep, policy, &record.steps);
  std::vector<double> tilts(n);
  for (std::size_t j = 0; j < n; ++j) tilts[j] = tilt_angle(system, j);

  const auto nd = static_cast<Eigen::Index>(detail::nuclear_dim(n));
  Eigen::MatrixXcd rho_n = detail::product_nuclear_state(n, policy.initial_polarization);
  const double p_e = policy.reset_mode.polarization();
  record.sweeps.reserve(policy.sweeps);
  for (std::size_t s = 0; s < policy.sweeps; ++s) {
    Eigen::MatrixXcd rho = detail::with_electron_reset(rho_n, p_e);
    rho = u * rho * u.adjoint();
    record.sweeps.push_back(measure(rho, n, tilts));
    rho_n = detail::nuclear_reduced(rho, nd);
  }
  return record;
}

/// Probability vector over diabatic branch states (manifold, configuration),
/// index = manifold * 2^N + configuration. Labels read "0:ud" / "1:du" with
/// nucleus 0 first; m_s = +1 configurations refer to the tilted axes.
class BranchDistribution {
 public:
  explicit BranchDistribution(std::size_t nuclei)
      : nuclei_(nuclei), p_(2 * detail::nuclear_dim(nuclei), 0.0) {}

  std::size_t nucleus_count() const noexcept { return nuclei_; }
  std::size_t size() const noexcept { return p_.size(); }

  double& at(int manifold, std::uint32_t config) { return p_.at(index(manifold, config)); }
  double at(int manifold, std::uint32_t config) const { return p_.at(index(manifold, config)); }
  double& operator[](const std::string& label) { return p_.at(parse(label)); }
  double operator[](const std::string& label) const { return p_.at(parse(label)); }
  const std::vector<double>& probabilities() const noexcept { return p_; }
  std::vector<double>& probabilities() noexcept { return p_; }

  std::string label(std::size_t i) const {
    const std::size_t nd = detail::nuclear_dim(nuclei_);
    std::string s = i < nd ? "0:" : "1:";
    const auto c = static_cast<std::uint32_t>(i % nd);
    for (std::size_t j = 0; j < nuclei_; ++j) s += ((c >> j) & 1u) ? 'u' : 'd';
    return s;
  }

  double total() const noexcept {
    double t = 0.0;
    for (double v : p_) t += v;
    return t;
  }

  /// <sigma_z,j> over both manifolds, each in its own quantization axis.
  double polarization(std::size_t j) const {
    require(j < nuclei_, ErrorCode::IndexOutOfRange, "nucleus index out of range");
    const std::size_t nd = detail::nuclear_dim(nuclei_);
    double s = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) {
      s += p_[i] * detail::spin_sign(static_cast<std::uint32_t>(i % nd), j);
    }
    return s;
  }

  friend bool operator==(const BranchDistribution&, const BranchDistribution&) = default;

 private:
  std::size_t index(int manifold, std::uint32_t config) const {
    const std::size_t nd = detail::nuclear_dim(nuclei_);
    require((manifold == 0 || manifold == 1) && config < nd, ErrorCode::IndexOutOfRange,
            "branch state out of range");
    return static_cast<std::size_t>(manifold) * nd + config;
  }

  std::size_t parse(const std::string& label) const {
    require(label.size() == 2 + nuclei_ && (label[0] == '0' || label[0] == '1') && label[1] == ':',
            ErrorCode::InvalidParams, "malformed branch label '" + label + "'");
    std::uint32_t c = 0;
    for (std::size_t j = 0; j < nuclei_; ++j) {
      const char ch = label[2 + j];
      require(ch == 'u' || ch == 'd', ErrorCode::InvalidParams,
              "malformed branch label '" + label + "'");
      if (ch == 'u') c |= (1u << j);
    }
    return index(label[0] - '0', c);
  }

  std::size_t nuclei_;
  std::vector<double> p_;
};

enum class GaltonMode { Auto, Exact, MonteCarlo };

inline constexpr std::size_t galton_exact_max_nuclei = 12;

/// Sequential Landau-Zener traversal of the cascade: at every anti-crossing a
/// walker on either of its two diabatic branches stays with probability T(gap)
/// and switches with probability 1 - T(gap).
inline BranchDistribution galton_board_sweep(const LacCascade& cascade, double omega_r,
                                             double bandwidth, const BranchDistribution& initial,
                                             std::size_t trials, std::uint64_t seed,
                                             TunnelingLaw law = TunnelingLaw::Standard,
                                             GaltonMode mode = GaltonMode::Auto) {
  require(trials >= 1, ErrorCode::InvalidParams, "trials must be >= 1");
  require(initial.nucleus_count() == cascade.nucleus_count(), ErrorCode::InvalidParams,
          "initial distribution and cascade disagree on the nucleus count");
  for (std::size_t i = 1; i < cascade.size(); ++i) {
    require(cascade[i - 1].location <= cascade[i].location, ErrorCode::InvalidParams,
            "cascade must be sorted by location");
  }
  const std::size_t nd = detail::nuclear_dim(cascade.nucleus_count());
  std::vector<double> t(cascade.size());
  for (std::size_t k = 0; k < cascade.size(); ++k) {
    t[k] = tunneling_probability(cascade[k].gap, omega_r, bandwidth, law);
  }
  if (mode == GaltonMode::Auto) {
    mode = cascade.nucleus_count() <= galton_exact_max_nuclei ? GaltonMode::Exact
                                                              : GaltonMode::MonteCarlo;
  }

  BranchDistribution out(cascade.nucleus_count());
  if (mode == GaltonMode::Exact) {
    auto& p = out.probabilities();
    p = initial.probabilities();
    for (std::size_t k = 0; k < cascade.size(); ++k) {
      const std::size_t a = cascade[k].ms0_config;
      const std::size_t b = nd + cascade[k].ms1_config;
      const double pa = p[a];
      const double pb = p[b];
      p[a] = t[k] * pa + (1.0 - t[k]) * pb;
      p[b] = t[k] * pb + (1.0 - t[k]) * pa;
    }
    return out;
  }

  // Monte Carlo: inverse-CDF start, one keyed uniform per (trial, crossing).
  const auto& p0 = initial.probabilities();
  const double norm = initial.total();
  require(norm > 0.0, ErrorCode::InvalidParams, "initial distribution is empty");
  const CounterRng rng(seed);
  std::vector<std::size_t> counts(out.size(), 0);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    double u = rng.uniform(trial, 0) * norm;
    std::size_t state = 0;
    while (state + 1 < p0.size() && u >= p0[state]) u -= p0[state++];
    for (std::size_t k = 0; k < cascade.size(); ++k) {
      const std::size_t a = cascade[k].ms0_config;
      const std::size_t b = nd + cascade[k].ms1_config;
      if (state != a && state != b) continue;
      if (rng.uniform(trial, k + 1) >= t[k]) state = (state == a) ? b : a;
    }
    ++counts[state];
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.probabilities()[i] = norm * static_cast<double>(counts[i]) / static_cast<double>(trials);
  }
  return out;
}

}  // namespace ratchet
