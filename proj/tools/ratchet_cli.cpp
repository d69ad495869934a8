#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ratchet/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace ratchet;
  CLI::App app{"Swept-microwave DNP ratchet studies", "ratchet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RATCHET_VERSION);

  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = cli::default_threads();
  std::string law;
  bool svg = false;

  const std::string descriptions[] = {
      "analytic (and optionally bulk) DNP profile with omega_opt annotation",
      "power-regime study: per-cell profiles, fits and omega_opt slopes",
      "electron/proximal/bulk buildup curves and injection rates",
      "full quantum propagation of a few-nucleus system plus Galton-board cross-check",
      "cross-check a configuration and report warnings",
      "fit a measured profile CSV"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < cli::command_names().size(); ++i) {
    auto* sub = app.add_subcommand(cli::command_names()[i], descriptions[i]);
    sub->add_option("--config", config, "study configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "RNG seed (overrides seed)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tunneling-law", law, "paper | standard")
        ->check(CLI::IsMember({"paper", "standard"}));
    sub->add_flag("--svg", svg, "also write SVG plots");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::ConfigFailure;
  }

  cli::RunOptions options;
  options.config = config;
  options.threads = threads;
  options.svg = svg;
  std::string name;
  for (auto* sub : subs) {
    if (!sub->parsed()) continue;
    name = sub->get_name();
    if (sub->count("--out")) options.out = out_dir;
    if (sub->count("--seed")) options.seed = seed;
  }
  if (!law.empty()) options.law = parse_tunneling_law(law);
  return cli::run_command(name, options, std::cout, std::cerr);
}
