#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ratchet/buildup_model.hpp"
#include "ratchet/error.hpp"
#include "ratchet/io/csv.hpp"
#include "ratchet/profile_fit.hpp"
#include "ratchet/ratchet_analytic.hpp"
#include "ratchet/spin_system.hpp"
#include "ratchet/sweep_propagator.hpp"

// JSON study configuration. Keys mirror the field names of the library types;
// units are SI with all frequencies in Hz (see docs/config_schema.md).
namespace ratchet::io {

using json = nlohmann::json;

struct BuildupOptions {
  std::optional<double> dt;  // s; default is the largest stable step
  std::size_t stride = 1;
  double window = 0.6;  // s
  double reference_polarization = thermal_polarization_7t;
};

struct StudyConfig {
  SpinSystem system{0.036, {}};
  DriveConfig drive{0.0, 0.0, 0.0, 0.0};
  SweepConfig sweep{0.0, 1.0, 1.0, 0.0};
  RateChainParams chain{};
  std::optional<double> eps1_override;
  std::optional<double> eps2_override;

  std::vector<double> eta_e_grid;
  std::vector<double> eta_r_grid;
  std::vector<double> omega_r_grid;

  TunnelingLaw law = TunnelingLaw::Paper;
  bool bulk = false;
  double noise = 0.0;  // relative Gaussian noise added to profile signals

  PropagationPolicy propagation{};
  bool steps_auto = false;
  std::size_t galton_trials = 0;  // Monte Carlo cross-check in propagate; 0 = exact flow only

  BuildupOptions buildup{};
  std::string fit_profile;  // CSV read by the fit command
  FitWeighting fit_weighting = FitWeighting::Absolute;

  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
};

namespace detail {

inline double number_or_inf(const json& v, const std::string& key) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::ConfigError, key + ": expected a number or \"inf\"");
  }
  if (!v.is_number()) throw Error(ErrorCode::ConfigError, key + ": expected a number");
  return v.get<double>();
}

inline const json* find(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double get_number(const json& obj, const std::string& path, const char* key,
                         std::optional<double> fallback = std::nullopt) {
  const json* v = find(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    throw Error(ErrorCode::ConfigError, "missing key '" + path + "." + key + "'");
  }
  if (!v->is_number()) throw Error(ErrorCode::ConfigError, path + "." + key + ": expected a number");
  return v->get<double>();
}

/// Either an explicit list or {"min", "max", "points", "spacing": "log"|"linear"}.
inline std::vector<double> parse_grid(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw Error(ErrorCode::ConfigError, key + ": entries must be numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  if (!v.is_object()) throw Error(ErrorCode::ConfigError, key + ": expected a list or range object");
  const double lo = get_number(v, key, "min");
  const double hi = get_number(v, key, "max");
  const double n = get_number(v, key, "points");
  const std::string spacing = v.value("spacing", std::string("log"));
  if (n < 2 || hi <= lo) throw Error(ErrorCode::ConfigError, key + ": need points >= 2 and max > min");
  const auto count = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(count - 1);
    if (spacing == "log") {
      if (lo <= 0.0) throw Error(ErrorCode::ConfigError, key + ": log spacing needs min > 0");
      out.push_back(lo * std::pow(hi / lo, f));
    } else if (spacing == "linear") {
      out.push_back(lo + (hi - lo) * f);
    } else {
      throw Error(ErrorCode::ConfigError, key + ".spacing must be 'log' or 'linear'");
    }
  }
  return out;
}

inline json number_or_inf_json(double v) {
  return std::isinf(v) ? json("inf") : json(v);
}

}  // namespace detail

inline StudyConfig parse_config(const json& root) {
  if (!root.is_object()) throw Error(ErrorCode::ConfigError, "config root must be an object");
  StudyConfig cfg;
  try {
    const json* sys = detail::find(root, "system");
    if (!sys) throw Error(ErrorCode::ConfigError, "missing key 'system'");
    const PhysicalConstants defaults;
    const PhysicalConstants constants(
        detail::get_number(*sys, "system", "gamma_e", defaults.gamma_e()),
        detail::get_number(*sys, "system", "gamma_n", defaults.gamma_n()),
        detail::get_number(*sys, "system", "delta_zfs", defaults.delta_zfs()));
    std::vector<HyperfineCoupling> nuclei;
    if (const json* list = detail::find(*sys, "nuclei")) {
      if (!list->is_array()) throw Error(ErrorCode::ConfigError, "system.nuclei must be a list");
      for (const auto& n : *list) {
        nuclei.emplace_back(detail::get_number(n, "system.nuclei[]", "a_par"),
                            detail::get_number(n, "system.nuclei[]", "a_perp"));
      }
    }
    const double cap = detail::get_number(*sys, "system", "exact_cap",
                                          static_cast<double>(SpinSystem::default_exact_cap));
    cfg.system = SpinSystem(constants, detail::get_number(*sys, "system", "b0"), std::move(nuclei),
                            static_cast<std::size_t>(cap));

    const json* drv = detail::find(root, "drive");
    if (!drv) throw Error(ErrorCode::ConfigError, "missing key 'drive'");
    cfg.drive = DriveConfig(detail::get_number(*drv, "drive", "eta_e"),
                            detail::get_number(*drv, "drive", "eta_r"),
                            detail::get_number(*drv, "drive", "c_e"),
                            detail::get_number(*drv, "drive", "c_r"));

    const json* swp = detail::find(root, "sweep");
    if (!swp) throw Error(ErrorCode::ConfigError, "missing key 'sweep'");
    double f0 = cfg.system.electron_resonance();
    if (const json* f = detail::find(*swp, "f0")) {
      if (f->is_string() && f->get<std::string>() == "resonance") {
        f0 = cfg.system.electron_resonance();
      } else {
        f0 = detail::get_number(*swp, "sweep", "f0");
      }
    }
    cfg.sweep = SweepConfig(f0, detail::get_number(*swp, "sweep", "bandwidth"),
                            detail::get_number(*swp, "sweep", "omega_r", 100.0),
                            detail::get_number(*swp, "sweep", "duration", 20.0));

    if (const json* gaps = detail::find(root, "gaps")) {
      if (detail::find(*gaps, "eps1")) cfg.eps1_override = detail::get_number(*gaps, "gaps", "eps1");
      if (detail::find(*gaps, "eps2")) cfg.eps2_override = detail::get_number(*gaps, "gaps", "eps2");
    }

    if (const json* ch = detail::find(root, "chain")) {
      if (const json* kd = detail::find(*ch, "kappa_d")) {
        cfg.chain.kappa_d = detail::number_or_inf(*kd, "chain.kappa_d");
      }
      cfg.chain.t1n = detail::get_number(*ch, "chain", "t1n", default_t1n);
      cfg.chain.n_prox = detail::get_number(*ch, "chain", "n_prox", 1.0);
      cfg.chain.n_bulk = detail::get_number(*ch, "chain", "n_bulk", default_pool_ratio);
      cfg.chain.validate();
    }

    if (const json* grids = detail::find(root, "grids")) {
      if (const json* g = detail::find(*grids, "eta_e")) cfg.eta_e_grid = detail::parse_grid(*g, "grids.eta_e");
      if (const json* g = detail::find(*grids, "eta_r")) cfg.eta_r_grid = detail::parse_grid(*g, "grids.eta_r");
      if (const json* g = detail::find(*grids, "omega_r")) cfg.omega_r_grid = detail::parse_grid(*g, "grids.omega_r");
    }

    if (const json* mode = detail::find(root, "mode")) {
      if (const json* law = detail::find(*mode, "tunneling_law")) {
        cfg.law = parse_tunneling_law(law->get<std::string>());
      }
      cfg.bulk = mode->value("bulk_profile", false);
      cfg.noise = detail::get_number(*mode, "mode", "noise", 0.0);
      if (cfg.noise < 0.0) throw Error(ErrorCode::ConfigError, "mode.noise must be >= 0");
      if (const json* reset = detail::find(*mode, "reset")) {
        if (reset->is_string() && reset->get<std::string>() == "full") {
          cfg.propagation.reset_mode = ResetMode::full();
        } else if (reset->is_object() && detail::find(*reset, "partial")) {
          cfg.propagation.reset_mode =
              ResetMode::partial(detail::get_number(*reset, "mode.reset", "partial"));
        } else {
          throw Error(ErrorCode::ConfigError, "mode.reset must be \"full\" or {\"partial\": p_e}");
        }
      }
    }

    if (const json* prop = detail::find(root, "propagation")) {
      if (const json* steps = detail::find(*prop, "steps_per_sweep")) {
        if (steps->is_string() && steps->get<std::string>() == "auto") {
          cfg.steps_auto = true;
        } else {
          cfg.propagation.steps_per_sweep = static_cast<std::size_t>(
              detail::get_number(*prop, "propagation", "steps_per_sweep"));
        }
      }
      cfg.propagation.sweeps =
          static_cast<std::size_t>(detail::get_number(*prop, "propagation", "sweeps", 1.0));
      cfg.propagation.initial_polarization =
          detail::get_number(*prop, "propagation", "initial_polarization", 0.0);
      cfg.propagation.refine_near_lacs = prop->value("refine_near_lacs", true);
      cfg.galton_trials =
          static_cast<std::size_t>(detail::get_number(*prop, "propagation", "galton_trials", 0.0));
      cfg.propagation.validate();
    }

    if (const json* b = detail::find(root, "buildup")) {
      if (detail::find(*b, "dt")) cfg.buildup.dt = detail::get_number(*b, "buildup", "dt");
      cfg.buildup.stride = static_cast<std::size_t>(detail::get_number(*b, "buildup", "stride", 1.0));
      cfg.buildup.window = detail::get_number(*b, "buildup", "window", 0.6);
      cfg.buildup.reference_polarization =
          detail::get_number(*b, "buildup", "reference_polarization", thermal_polarization_7t);
      if (cfg.buildup.stride < 1) throw Error(ErrorCode::ConfigError, "buildup.stride must be >= 1");
    }

    if (const json* fit = detail::find(root, "fit")) {
      cfg.fit_profile = fit->value("profile", std::string());
      cfg.fit_weighting = parse_fit_weighting(fit->value("weighting", std::string("absolute")));
    }

    if (const json* out = detail::find(root, "output")) cfg.output_dir = out->get<std::string>();
    if (const json* seed = detail::find(root, "seed")) cfg.seed = seed->get<std::uint64_t>();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return cfg;
}

inline StudyConfig load_config(const std::filesystem::path& path) {
  json root;
  try {
    root = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return parse_config(root);
}

/// Fully resolved configuration, defaults included, for run manifests.
inline json to_json(const StudyConfig& c) {
  json j;
  json nuclei = json::array();
  for (const auto& n : c.system.nuclei()) nuclei.push_back({{"a_par", n.a_par()}, {"a_perp", n.a_perp()}});
  j["system"] = {{"b0", c.system.b0()},
                 {"gamma_e", c.system.constants().gamma_e()},
                 {"gamma_n", c.system.constants().gamma_n()},
                 {"delta_zfs", c.system.constants().delta_zfs()},
                 {"exact_cap", c.system.exact_cap()},
                 {"nuclei", nuclei}};
  j["drive"] = {{"eta_e", c.drive.eta_e()},
                {"eta_r", c.drive.eta_r()},
                {"c_e", c.drive.c_e()},
                {"c_r", c.drive.c_r()}};
  j["sweep"] = {{"f0", c.sweep.f0()},
                {"bandwidth", c.sweep.bandwidth()},
                {"omega_r", c.sweep.omega_r()},
                {"duration", c.sweep.duration()}};
  j["gaps"] = json::object();
  if (c.eps1_override) j["gaps"]["eps1"] = *c.eps1_override;
  if (c.eps2_override) j["gaps"]["eps2"] = *c.eps2_override;
  j["chain"] = {{"kappa_d", detail::number_or_inf_json(c.chain.kappa_d)},
                {"t1n", c.chain.t1n},
                {"n_prox", c.chain.n_prox},
                {"n_bulk", c.chain.n_bulk}};
  j["grids"] = {{"eta_e", c.eta_e_grid}, {"eta_r", c.eta_r_grid}, {"omega_r", c.omega_r_grid}};
  json reset = c.propagation.reset_mode.kind == ResetMode::Kind::Full
                   ? json("full")
                   : json{{"partial", c.propagation.reset_mode.p_e}};
  j["mode"] = {{"tunneling_law", to_string(c.law)},
               {"bulk_profile", c.bulk},
               {"noise", c.noise},
               {"reset", reset}};
  j["propagation"] = {{"steps_per_sweep", c.steps_auto ? json("auto") : json(c.propagation.steps_per_sweep)},
                      {"sweeps", c.propagation.sweeps},
                      {"initial_polarization", c.propagation.initial_polarization},
                      {"refine_near_lacs", c.propagation.refine_near_lacs},
                      {"galton_trials", c.galton_trials}};
  j["buildup"] = {{"stride", c.buildup.stride},
                  {"window", c.buildup.window},
                  {"reference_polarization", c.buildup.reference_polarization}};
  if (c.buildup.dt) j["buildup"]["dt"] = *c.buildup.dt;
  j["fit"] = {{"weighting", to_string(c.fit_weighting)}};
  if (!c.fit_profile.empty()) j["fit"]["profile"] = c.fit_profile;
  j["output"] = c.output_dir.string();
  j["seed"] = c.seed;
  return j;
}

}  // namespace ratchet::io
