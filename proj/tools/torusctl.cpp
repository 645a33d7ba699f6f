// torusctl: configuration-driven front end for the torus Schrodinger toolkit.

#include <CLI11.hpp>

#include <iostream>

#include "torus/cli/commands.hpp"
#include "torus/linalg.hpp"

int main(int argc, char** argv) {
  torus::prepare_blas(argv);
  using namespace torus::cli;
  CLI::App app{"Schrodinger observability and control experiments on flat tori"};
  app.require_subcommand(1);
  RunOptions opt;
  std::uint64_t seed = 0;
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "experiment config (TOML); default: embedded");
    sub->add_option("--out", opt.out_dir, "output directory (overrides $TORUSCTL_OUT)");
    sub->add_option("--seed", seed, "master seed, replaces the config seed");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->callback([&opt, name] { opt.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }
  for (const CLI::App* sub : app.get_subcommands())
    if (sub->count("--seed")) opt.seed = seed;
  return run(opt, std::cerr);
}
