#include <iostream>

#include "CLI11.hpp"
#include "ngrem/cli.hpp"

int main(int argc, char** argv) {
  ngrem::cli::RunConfig config;
  CLI::App app{"Free energies and simulations of the nonhierarchical GREM"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("--model", config.model_path, "model file (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--beta-min", config.beta_min, "first grid point")->capture_default_str();
  app.add_option("--beta-max", config.beta_max, "last grid point")->capture_default_str();
  app.add_option("--beta-steps", config.beta_steps, "number of grid points")->capture_default_str();
  app.add_option("--N", config.sizes, "total system size(s); the first one is used by ultrametric")
      ->capture_default_str();
  app.add_option("--replicas", config.replicas, "independent realizations per size")->capture_default_str();
  app.add_option("--seed", config.seed, "master seed")->capture_default_str();
  app.add_option("--out", config.output_path, "write results here instead of stdout");
  app.add_option("--format", config.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_flag("--exact", config.exact, "rational arithmetic for chain construction");
  app.add_option("--threads", config.threads, "worker threads for the configuration sweep")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--partitions", config.partitions, "sweep blocks (fixes the reduction order)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--tol", config.tol, "duality gap target for the variational solver")->capture_default_str();

  app.add_subcommand("validate", "print the normalized model");
  app.add_subcommand("chain", "print the optimal chain");
  app.add_subcommand("curve", "segment table and sampled free energy");
  app.add_subcommand("oracle", "closed form vs variational vs chain minimum");
  app.add_subcommand("simulate", "quenched Monte Carlo estimates");
  app.add_subcommand("ultrametric", "search for an ultrametricity violation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ngrem::cli::kValidationError;
  }
  config.command = app.get_subcommands().front()->get_name();
  return ngrem::cli::run(config);
}
