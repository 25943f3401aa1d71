#include <iostream>

#include "CLI11.hpp"
#include "uam/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Layered UAM airspace simulator"};
  app.require_subcommand(1);

  uam::cli::CliInvocation inv;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool scenario_required) {
    auto* opt = sub->add_option("--scenario", inv.scenario, "scenario file or builtin name");
    if (scenario_required) opt->required();
    sub->add_option("--out", inv.out_dir, "output directory");
    sub->add_option("--set", inv.overrides, "override key=value (repeatable)");
    sub->add_option("--seed", seed, "RNG seed override");
  };
  add_common(app.add_subcommand("simulate", "run one scenario and write trace, metrics and series"), true);
  add_common(app.add_subcommand("delay-bounds", "failure probability and delay bound vs load"), true);
  add_common(app.add_subcommand("phase-sweep", "served capacity per phase resolution"), true);
  add_common(app.add_subcommand("ipr-sweep", "IPR vs duration threshold per roster size"), true);
  add_common(app.add_subcommand("validate", "check scenario invariants and reference defaults"), false);

  CLI11_PARSE(app, argc, argv);

  inv.subcommand = app.get_subcommands().front()->get_name();
  if (app.get_subcommands().front()->count("--seed") > 0) inv.seed = seed;
  return uam::cli::dispatch(inv, std::cout, std::cerr);
}
