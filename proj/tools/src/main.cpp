#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hlab/config.hpp"
#include "runner.hpp"

namespace {

constexpr int kUsageError = 64;  // malformed invocation or config

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "harnacklab: numerical verification of measure-theoretic estimates "
      "(contact-set bounds, critical density, level-set decay, Harnack "
      "quotients) for p-Laplacian-type operators on model geometries"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string filter;
  app.add_option("--config", config_path, "experiment configuration file");
  app.add_option("--out", out_dir, "output directory (CSV + summary JSON)");
  app.add_option("--seed", seed, "base seed for the randomized sweeps");
  app.add_option("--jobs", jobs, "worker threads for sweeps");
  app.add_option("--filter", filter, "keep only rows whose tag contains this");

  for (const std::string& name : hlab::cli::subcommands())
    app.add_subcommand(name, "run the " + name + " suite")->fallthrough();
  app.add_subcommand("all", "run every suite in order")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  hlab::cli::RunContext ctx;
  if (!config_path.empty()) {
    try {
      ctx.config = hlab::cfg::Config::parse_file(config_path);
    } catch (const hlab::cfg::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n\n" << app.help();
      return kUsageError;
    }
  }
  try {
    ctx.out_dir = out_dir;
    ctx.seed = seed != 0 ? seed
                         : static_cast<std::uint64_t>(
                               ctx.config.get_int("run.seed", 17));
    ctx.jobs = jobs != 0 ? jobs : ctx.config.get_int("run.jobs", 4);
    ctx.filter = filter;

    for (const auto* sub : app.get_subcommands())
      return hlab::cli::run(sub->get_name(), ctx);
    return kUsageError;  // unreachable: a subcommand is required
  } catch (const hlab::cfg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 70;
  }
}
