#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "ratchet/buildup_model.hpp"
#include "ratchet/cli/parallel.hpp"
#include "ratchet/counter_rng.hpp"
#include "ratchet/error.hpp"
#include "ratchet/io/config.hpp"
#include "ratchet/io/csv.hpp"
#include "ratchet/io/svg_plot.hpp"
#include "ratchet/lz_cascade.hpp"
#include "ratchet/profile_fit.hpp"
#include "ratchet/ratchet_analytic.hpp"
#include "ratchet/spin_system.hpp"
#include "ratchet/sweep_propagator.hpp"

#ifndef RATCHET_VERSION
#define RATCHET_VERSION "0.0.0"
#endif

namespace ratchet::cli {

using io::json;

enum ExitCode : int { Success = 0, RuntimeFailure = 1, ConfigFailure = 2 };

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<TunnelingLaw> law;
  unsigned threads = default_threads();
  bool svg = false;
};

/// Files produced by a command. Everything is written by one writer at the
/// end of the run, followed by the manifest.
class OutputSet {
 public:
  void add(const std::string& relative, std::string content) {
    files_[relative] = std::move(content);
  }
  const std::map<std::string, std::string>& files() const noexcept { return files_; }

  void write_all(const std::filesystem::path& dir) const {
    for (const auto& [name, content] : files_) io::write_text(dir / name, content);
  }

 private:
  std::map<std::string, std::string> files_;
};

struct RunContext {
  io::StudyConfig config;
  RunOptions options;
  OutputSet outputs;
  json notes = json::object();
  json failures = json::array();
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

namespace detail {

inline std::string index_tag(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%02zu", prefix, i);
  return buf;
}

inline const std::vector<double>& require_grid(const std::vector<double>& grid, const char* key) {
  if (grid.empty()) {
    throw Error(ErrorCode::ConfigError, std::string("missing or empty key '") + key + "'");
  }
  return grid;
}

/// Gap pair for nucleus 0 unless overridden in the config.
inline RatchetParams ratchet_params(const io::StudyConfig& cfg, const DriveConfig& drive) {
  RatchetParams p;
  p.kappa_e = drive.kappa_e();
  p.bandwidth = cfg.sweep.bandwidth();
  p.duration = cfg.sweep.duration();
  if (cfg.eps1_override && cfg.eps2_override) {
    p.eps1 = *cfg.eps1_override;
    p.eps2 = *cfg.eps2_override;
  } else {
    if (cfg.system.nucleus_count() == 0) {
      throw Error(ErrorCode::ConfigError,
                  "system.nuclei is empty and gaps.eps1/gaps.eps2 are not both given");
    }
    const auto g = analytic_gaps(cfg.system, drive, 0);
    p.eps1 = cfg.eps1_override.value_or(g.eps1);
    p.eps2 = cfg.eps2_override.value_or(g.eps2);
  }
  p.validate();
  return p;
}

/// Standard normal draw from two keyed uniforms (Box-Muller).
inline double gaussian(const CounterRng& rng, std::uint64_t stream) {
  const double u1 = 1.0 - rng.uniform(stream, 0);
  const double u2 = rng.uniform(stream, 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(units::two_pi * u2);
}

inline json fit_to_json(const FitResult& f) {
  json cov = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int k = 0; k < 4; ++k) row.push_back(f.covariance(i, k));
    cov.push_back(row);
  }
  return {{"amplitude", f.amplitude},
          {"kappa_e_fit", f.kappa_e_fit},
          {"eps1_fit", f.eps1_fit},
          {"eps2_fit", f.eps2_fit},
          {"omega_opt", f.omega_opt},
          {"residual_norm", f.residual_norm},
          {"covariance", cov},
          {"covariance_order", {"amplitude", "kappa_e", "eps1", "eps2"}},
          {"condition_number", std::isfinite(f.condition_number) ? json(f.condition_number) : json("inf")},
          {"extrapolated", f.extrapolated},
          {"ambiguous", f.ambiguous},
          {"iterations", f.iterations}};
}

inline std::string lac_csv(const LacCascade& cascade) {
  io::CsvTable t({"location_hz", "gap_hz", "branch_label", "degenerate", "multiplicity"});
  for (const auto& l : cascade) {
    t.add_row({io::format_number(l.location), io::format_number(l.gap), l.branch_label,
               l.degenerate ? "1" : "0", std::to_string(l.multiplicity)});
  }
  return t.str();
}

inline bool resonance_in_window(const io::StudyConfig& cfg) {
  const double r = cfg.system.electron_resonance();
  return r >= cfg.sweep.window_low() && r <= cfg.sweep.window_high();
}

inline void maybe_write_lacs(RunContext& ctx) {
  const auto& cfg = ctx.config;
  if (cfg.system.nucleus_count() == 0) return;
  if (!resonance_in_window(cfg)) {
    ctx.notes["lacs"] = "electron resonance outside the sweep window; cascade not scanned";
    return;
  }
  try {
    ctx.outputs.add("lacs.csv", lac_csv(locate_lacs(cfg.system, cfg.drive, cfg.sweep)));
  } catch (const Error& e) {
    ctx.notes["lacs"] = e.what();
  }
}

}  // namespace detail

inline void cmd_profile(RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto& grid = detail::require_grid(cfg.omega_r_grid, "grids.omega_r");
  const RatchetParams params = detail::ratchet_params(cfg, cfg.drive);

  io::CsvTable analytic({"omega_r_hz", "p_total"});
  std::vector<double> p(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    p[i] = total_polarization(params, grid[i], cfg.law);
    analytic.add_numbers({grid[i], p[i]});
  }
  ctx.outputs.add("profile_analytic.csv", analytic.str());

  if (cfg.noise > 0.0) {
    const CounterRng rng(cfg.seed);
    io::CsvTable noisy({"omega_r_hz", "signal"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      noisy.add_numbers({grid[i], p[i] * (1.0 + cfg.noise * detail::gaussian(rng, i))});
    }
    ctx.outputs.add("profile_noisy.csv", noisy.str());
  }

  json annotation;
  annotation["params"] = {{"kappa_e", params.kappa_e},
                          {"eps1", params.eps1},
                          {"eps2", params.eps2},
                          {"bandwidth", params.bandwidth},
                          {"duration", params.duration},
                          {"tunneling_law", to_string(cfg.law)}};
  if (params.gap_order_suspect()) annotation["warning"] = "eps2 > eps1";
  try {
    const double w = find_omega_opt(params, {}, cfg.law);
    annotation["analytic"] = {{"omega_opt_hz", w},
                              {"p_total_at_opt", total_polarization(params, w, cfg.law)},
                              {"interior", true}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoInteriorMaximum) throw;
    annotation["analytic"] = {{"interior", false}, {"message", e.what()}};
  }

  std::vector<io::PlotSeries> series{{"analytic", grid, p}};
  if (cfg.bulk) {
    const BulkModel model{params, cfg.chain, cfg.law};
    const std::size_t steps = model.steps();
    auto results = parallel_map<double>(grid.size(), ctx.options.threads,
                                        [&](std::size_t i) { return model.bulk_polarization(grid[i], steps); });
    io::CsvTable bulk({"omega_r_hz", "p_bulk"});
    std::vector<double> pb;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!results[i].value) throw Error(ErrorCode::InvalidParams, results[i].error);
      pb.push_back(*results[i].value);
      bulk.add_numbers({grid[i], pb.back()});
    }
    ctx.outputs.add("profile_bulk.csv", bulk.str());
    try {
      const double w = bulk_omega_opt(model);
      annotation["bulk"] = {{"omega_opt_hz", w}, {"interior", true}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoInteriorMaximum) throw;
      annotation["bulk"] = {{"interior", false}, {"message", e.what()}};
    }
    // Scale for a shared plot axis.
    const double pmax = *std::max_element(p.begin(), p.end());
    const double bmax = *std::max_element(pb.begin(), pb.end());
    if (pmax > 0.0 && bmax > 0.0) {
      for (auto& v : pb) v *= pmax / bmax;
    }
    series.push_back({"bulk (rescaled)", grid, pb});
  }
  ctx.outputs.add("omega_opt.json", annotation.dump(2) + "\n");
  detail::maybe_write_lacs(ctx);

  if (ctx.options.svg) {
    ctx.outputs.add("profile.svg",
                    io::render_svg(series, {"DNP profile", "omega_r (Hz)", "P", true}));
  }
  if (annotation["analytic"].value("interior", false)) {
    *ctx.out << "omega_opt = " << io::format_number(annotation["analytic"]["omega_opt_hz"].get<double>())
             << " Hz\n";
  }
}

struct CellOutcome {
  std::vector<double> signal;
  double omega_opt = 0.0;
  std::optional<FitResult> fit;
  std::string fit_error;
};

inline void cmd_regimes(RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto& grid = detail::require_grid(cfg.omega_r_grid, "grids.omega_r");
  const auto& eta_e = detail::require_grid(cfg.eta_e_grid, "grids.eta_e");
  const auto& eta_r = detail::require_grid(cfg.eta_r_grid, "grids.eta_r");
  if (cfg.system.nucleus_count() == 0) {
    throw Error(ErrorCode::ConfigError, "regimes needs at least one entry in system.nuclei");
  }
  const std::size_t ne = eta_e.size();
  const std::size_t cells = ne * eta_r.size();

  auto results = parallel_map<CellOutcome>(cells, ctx.options.threads, [&](std::size_t k) {
    const DriveConfig drive = cfg.drive.with_powers(eta_e[k % ne], eta_r[k / ne]);
    const BulkModel model =
        make_bulk_model(cfg.system, drive, cfg.sweep.bandwidth(), cfg.chain, cfg.sweep.duration(), cfg.law);
    CellOutcome cell;
    const std::size_t steps = model.steps();
    for (double w : grid) cell.signal.push_back(model.bulk_polarization(w, steps));
    cell.omega_opt = bulk_omega_opt(model);
    try {
      cell.fit = fit_profile(DnpProfile(grid, cell.signal,
                                        {drive.eta_e(), drive.eta_r(), cfg.sweep.bandwidth(),
                                         cfg.sweep.duration()}),
                             std::nullopt, FitOptions{.weighting = cfg.fit_weighting});
    } catch (const Error& e) {
      cell.fit_error = e.what();
    }
    return cell;
  });

  io::CsvTable table({"eta_r_w", "eta_e_w", "omega_opt_hz", "fit_kappa_e", "fit_eps1_hz",
                      "fit_eps2_hz", "fit_omega_opt_hz", "status"});
  io::CsvTable summary({"eta_r_w", "slope_hz_per_w", "slope_se", "intercept_hz", "r2", "points",
                        "status"});
  std::vector<double> slopes, slope_eta;
  for (std::size_t ir = 0; ir < eta_r.size(); ++ir) {
    std::vector<std::pair<double, double>> points;
    for (std::size_t ie = 0; ie < ne; ++ie) {
      const std::size_t k = ir * ne + ie;
      const std::string tag = detail::index_tag("r", ir) + "_" + detail::index_tag("e", ie);
      const auto& res = results[k];
      if (!res.value) {
        ctx.failures.push_back({{"cell", tag}, {"eta_r", eta_r[ir]}, {"eta_e", eta_e[ie]}, {"error", res.error}});
        table.add_row({io::format_number(eta_r[ir]), io::format_number(eta_e[ie]), "", "", "", "", "",
                       "failed"});
        continue;
      }
      const auto& cell = *res.value;
      io::CsvTable profile({"omega_r_hz", "p_bulk"});
      for (std::size_t i = 0; i < grid.size(); ++i) profile.add_numbers({grid[i], cell.signal[i]});
      ctx.outputs.add("cells/" + tag + ".csv", profile.str());
      points.emplace_back(eta_e[ie], cell.omega_opt);
      std::string status = "ok";
      std::vector<std::string> fit_cells(4);
      if (cell.fit) {
        ctx.outputs.add("fits/" + tag + ".json", detail::fit_to_json(*cell.fit).dump(2) + "\n");
        fit_cells = {io::format_number(cell.fit->kappa_e_fit), io::format_number(cell.fit->eps1_fit),
                     io::format_number(cell.fit->eps2_fit), io::format_number(cell.fit->omega_opt)};
        if (cell.fit->ambiguous) status = "fit_ambiguous";
      } else {
        status = "fit_failed";
        ctx.failures.push_back({{"cell", tag}, {"eta_r", eta_r[ir]}, {"eta_e", eta_e[ie]}, {"error", cell.fit_error}});
      }
      table.add_row({io::format_number(eta_r[ir]), io::format_number(eta_e[ie]),
                     io::format_number(cell.omega_opt), fit_cells[0], fit_cells[1], fit_cells[2],
                     fit_cells[3], status});
    }
    try {
      const auto reg = regress_omega_opt(points);
      summary.add_row({io::format_number(eta_r[ir]), io::format_number(reg.slope),
                       io::format_number(reg.slope_se), io::format_number(reg.intercept),
                       io::format_number(reg.r2), std::to_string(points.size()), "ok"});
      slopes.push_back(reg.slope);
      slope_eta.push_back(eta_r[ir]);
    } catch (const Error& e) {
      summary.add_row({io::format_number(eta_r[ir]), "", "", "", "", std::to_string(points.size()),
                       "degenerate"});
      ctx.notes["regression_" + detail::index_tag("r", ir)] = e.what();
    }
  }
  ctx.outputs.add("cells.csv", table.str());
  ctx.outputs.add("regimes_summary.csv", summary.str());
  if (ctx.options.svg && !slopes.empty()) {
    ctx.outputs.add("slopes.svg", io::render_svg({{"d omega_opt / d eta_e", slope_eta, slopes}},
                                                 {"Ratchet speed-up", "eta_r (W)", "slope (Hz/W)", false}));
  }
}

inline void cmd_buildup(RunContext& ctx) {
  const auto& cfg = ctx.config;
  const std::vector<double> eta_e = cfg.eta_e_grid.empty() ? std::vector<double>{cfg.drive.eta_e()}
                                                           : cfg.eta_e_grid;
  const double omega = cfg.sweep.omega_r();
  io::CsvTable summary({"eta_e_w", "kappa_e", "inj_rate", "injection_rate_per_s",
                        "injection_percent_per_s", "p_bulk_final"});
  std::vector<io::PlotSeries> series;
  for (std::size_t i = 0; i < eta_e.size(); ++i) {
    const DriveConfig drive = cfg.drive.with_powers(eta_e[i], cfg.drive.eta_r());
    const RatchetParams rp = detail::ratchet_params(cfg, drive);
    RateChainParams chain = cfg.chain;
    chain.kappa_e = drive.kappa_e();
    chain.omega_r = omega;
    chain.inj_rate = omega * per_sweep_polarization(tunneling_probability(rp.eps1, omega, rp.bandwidth, cfg.law),
                                                    tunneling_probability(rp.eps2, omega, rp.bandwidth, cfg.law));
    const double dt = cfg.buildup.dt.value_or(std::min(chain.max_step(), cfg.buildup.window / 50.0));
    const auto series_i = simulate_buildup(chain, cfg.sweep.duration(), dt, cfg.buildup.stride);
    io::CsvTable t({"time_s", "p_e", "p_prox", "p_bulk"});
    for (std::size_t k = 0; k < series_i.size(); ++k) {
      t.add_numbers({series_i.time[k], series_i.pe[k], series_i.pp[k], series_i.pb[k]});
    }
    ctx.outputs.add("buildup/" + detail::index_tag("e", i) + ".csv", t.str());
    const double slope = small_time_injection_rate(series_i, cfg.buildup.window);
    summary.add_numbers({eta_e[i], chain.kappa_e, chain.inj_rate, slope,
                         injection_rate_percent(slope, cfg.buildup.reference_polarization),
                         series_i.pb.back()});
    series.push_back({"eta_e = " + io::format_number(eta_e[i]) + " W", series_i.time, series_i.pb});
  }
  ctx.outputs.add("buildup_summary.csv", summary.str());
  if (ctx.options.svg) {
    ctx.outputs.add("buildup.svg", io::render_svg(series, {"Bulk buildup", "t (s)", "P_b", false}));
  }
}

inline void cmd_propagate(RunContext& ctx) {
  const auto& cfg = ctx.config;
  PropagationPolicy policy = cfg.propagation;
  if (cfg.steps_auto) {
    policy.steps_per_sweep =
        std::max<std::size_t>(1000, 2 * required_steps_per_sweep(cfg.system, cfg.drive, cfg.sweep));
  }
  const auto record = propagate_sweep(cfg.system, cfg.drive, cfg.sweep, policy);
  io::CsvTable t({"sweep_index", "nucleus_index", "iz_expectation"});
  io::CsvTable d({"sweep_index", "nucleus_index", "iz_ms0", "iz_prime_ms1", "ms1_population",
                  "trace_drift", "min_eigenvalue"});
  for (std::size_t s = 0; s < record.sweeps.size(); ++s) {
    const auto& o = record.sweeps[s];
    for (std::size_t j = 0; j < record.nucleus_count; ++j) {
      t.add_row({std::to_string(s), std::to_string(j), io::format_number(o.iz[j])});
      d.add_row({std::to_string(s), std::to_string(j), io::format_number(o.iz_ms0[j]),
                 io::format_number(o.iz_prime_ms1[j]), io::format_number(o.ms1_population),
                 io::format_number(o.trace_drift), io::format_number(o.min_eigenvalue)});
    }
  }
  ctx.outputs.add("propagation.csv", t.str());
  ctx.outputs.add("propagation_detail.csv", d.str());
  ctx.notes["steps_per_sweep"] = record.steps;

  const std::size_t n = cfg.system.nucleus_count();
  if (n == 0 || !detail::resonance_in_window(cfg)) return;
  LacCascade cascade;
  try {
    cascade = locate_lacs(cfg.system, cfg.drive, cfg.sweep);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoCrossingInBandwidth) throw;
    ctx.notes["lacs"] = e.what();
    return;
  }
  ctx.outputs.add("lacs.csv", detail::lac_csv(cascade));
  BranchDistribution init(n);
  const auto rho = ratchet::detail::product_nuclear_state(n, policy.initial_polarization);
  const double p0 = 0.5 * (1.0 + policy.reset_mode.polarization());
  for (std::uint32_t c = 0; c < ratchet::detail::nuclear_dim(n); ++c) {
    init.at(0, c) = p0 * rho(c, c).real();
    init.at(1, c) = (1.0 - p0) * rho(c, c).real();
  }
  const auto exact = galton_board_sweep(cascade, cfg.sweep.omega_r(), cfg.sweep.bandwidth(), init, 1,
                                        cfg.seed, TunnelingLaw::Standard, GaltonMode::Exact);
  std::optional<BranchDistribution> mc;
  if (cfg.galton_trials > 0) {
    mc = galton_board_sweep(cascade, cfg.sweep.omega_r(), cfg.sweep.bandwidth(), init, cfg.galton_trials,
                            cfg.seed, TunnelingLaw::Standard, GaltonMode::MonteCarlo);
  }
  io::CsvTable g({"nucleus_index", "galton_exact", "galton_monte_carlo", "propagated_first_sweep"});
  for (std::size_t j = 0; j < n; ++j) {
    const auto& first = record.sweeps.front();
    g.add_row({std::to_string(j), io::format_number(exact.polarization(j)),
               mc ? io::format_number(mc->polarization(j)) : "",
               io::format_number(first.iz_ms0[j] + first.iz_prime_ms1[j])});
  }
  ctx.outputs.add("galton.csv", g.str());
}

inline void cmd_validate(RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto report = validate_system(cfg.system, cfg.drive, cfg.sweep);
  for (const auto& w : report.warnings) *ctx.err << "warning: " << w << "\n";
  for (const auto& e : report.errors) *ctx.err << "error: " << e << "\n";
  const json j = {{"passed", report.passed}, {"warnings", report.warnings}, {"errors", report.errors}};
  ctx.outputs.add("validation.json", j.dump(2) + "\n");
  *ctx.out << (report.passed ? "pass" : "fail") << " (" << report.warnings.size() << " warnings)\n";
}

inline void cmd_fit(RunContext& ctx) {
  const auto& cfg = ctx.config;
  if (cfg.fit_profile.empty()) throw Error(ErrorCode::ConfigError, "missing key 'fit.profile'");
  std::filesystem::path path = cfg.fit_profile;
  if (path.is_relative() && !ctx.options.config.empty()) path = ctx.options.config.parent_path() / path;
  const auto profile = io::read_profile_csv(
      path, {cfg.drive.eta_e(), cfg.drive.eta_r(), cfg.sweep.bandwidth(), cfg.sweep.duration()});
  const auto fit = fit_profile(profile, std::nullopt, FitOptions{.weighting = cfg.fit_weighting});
  ctx.outputs.add("fit.json", detail::fit_to_json(fit).dump(2) + "\n");
  *ctx.out << "omega_opt = " << io::format_number(fit.omega_opt) << " Hz"
           << (fit.extrapolated ? " (extrapolated)" : "") << "\n";
}

inline json versions() {
  return {{"ratchet", RATCHET_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__}};
}

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"profile", "regimes", "buildup", "propagate", "validate", "fit"};
  return names;
}

/// Runs one command end to end and returns the process exit code.
inline int run_command(const std::string& name, const RunOptions& options, std::ostream& out,
                       std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  RunContext ctx;
  ctx.options = options;
  ctx.out = &out;
  ctx.err = &err;
  try {
    ctx.config = io::load_config(options.config);
    if (options.out) ctx.config.output_dir = *options.out;
    if (options.seed) ctx.config.seed = *options.seed;
    if (options.law) ctx.config.law = *options.law;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return ConfigFailure;
  }

  int code = Success;
  try {
    if (name == "profile") cmd_profile(ctx);
    else if (name == "regimes") cmd_regimes(ctx);
    else if (name == "buildup") cmd_buildup(ctx);
    else if (name == "propagate") cmd_propagate(ctx);
    else if (name == "validate") cmd_validate(ctx);
    else if (name == "fit") cmd_fit(ctx);
    else throw Error(ErrorCode::ConfigError, "unknown command '" + name + "'");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    code = e.code() == ErrorCode::ConfigError ? ConfigFailure : RuntimeFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = RuntimeFailure;
  }
  if (code == ConfigFailure) return code;
  if (code == Success && !ctx.failures.empty()) {
    err << "error: " << ctx.failures.size() << " study cell(s) failed; see manifest.json\n";
    code = RuntimeFailure;
  }

  json manifest;
  manifest["command"] = name;
  manifest["config"] = io::to_json(ctx.config);
  manifest["seed"] = ctx.config.seed;
  manifest["threads"] = options.threads;
  manifest["tunneling_law"] = to_string(ctx.config.law);
  manifest["versions"] = versions();
  manifest["outputs"] = json::array();
  for (const auto& [file, _] : ctx.outputs.files()) manifest["outputs"].push_back(file);
  manifest["notes"] = ctx.notes;
  manifest["failed_cells"] = ctx.failures;
  manifest["exit_code"] = code;
  try {
    ctx.outputs.write_all(ctx.config.output_dir);
    manifest["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    io::write_text(ctx.config.output_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return RuntimeFailure;
  }
  return code;
}

}  // namespace ratchet::cli
