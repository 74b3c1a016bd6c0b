// thermolab <command> [options]; see README.md for the report schema.
#include <iostream>

#include <CLI11.hpp>

#include "thermolab/cli.hpp"

int main(int argc, char** argv) {
  thermo::RunConfig cfg;
  CLI::App app{"Thermodynamic formalism and large deviations for 1-D maps"};
  app.set_version_flag("--version", std::string(THERMOLAB_VERSION));
  app.set_config("--config", "", "TOML/INI file with any of the long options below");

  app.add_option("command", cfg.command, "Subcommand")
      ->required()
      ->check(CLI::IsMember(thermo::command_names()));
  app.add_option("--map", cfg.map, "Built-in name, logistic:r, inline JSON or JSON file")->capture_default_str();
  app.add_option("--potential", cfg.potential, "const:c, affine:a,b, branch:v0,.., cos:a,f, trig:..;.., pullback:..")
      ->capture_default_str();
  app.add_option("--observable", cfg.observable, "Observable psi, same syntax as --potential")->capture_default_str();
  app.add_option("--method", cfg.method, "pressure: preimage|periodic|spectral|variational; scgf: pressure|monte-carlo");
  app.add_option("--source", cfg.source, "ldp-check: preimages|periodic|birkhoff|all");
  app.add_option("--n-min", cfg.n_min)->capture_default_str();
  app.add_option("--n-max", cfg.n_max, "Depth / length cap (0: subcommand default)");
  app.add_option("--periodic-n-max", cfg.periodic_n_max);
  app.add_option("--m", cfg.m, "Transfer-operator sizes")->delimiter(',');
  app.add_option("--tolerance", cfg.tolerance)->capture_default_str();
  app.add_option("--x0", cfg.x0, "Preimage root");
  app.add_option("--prune", cfg.prune_delta, "Threshold pruning, nats below the running maximum");
  app.add_option("--t-min", cfg.t_min);
  app.add_option("--t-max", cfg.t_max);
  app.add_option("--t-count", cfg.t_count);
  app.add_option("--s-min", cfg.s_min)->capture_default_str();
  app.add_option("--s-max", cfg.s_max)->capture_default_str();
  app.add_option("--s-count", cfg.s_count)->capture_default_str();
  app.add_option("--s0", cfg.s0)->capture_default_str();
  app.add_option("--mc-n", cfg.mc_n)->capture_default_str();
  app.add_option("--trials", cfg.trials)->capture_default_str();
  app.add_option("--weakstar-n", cfg.weakstar_n)->delimiter(',')->capture_default_str();
  app.add_option("--growth-n", cfg.growth_n);
  app.add_option("--rho0", cfg.rho0)->capture_default_str();
  app.add_option("--margin-n", cfg.margin_n)->capture_default_str();
  app.add_option("--c", cfg.c, "complex-pressure: parameter re,im")->capture_default_str();
  app.add_option("--z0", cfg.z0, "complex-pressure: root re,im (default: beta fixed point)");
  app.add_option("--seed", cfg.seed)->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads; results do not depend on it")->capture_default_str();
  app.add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("-o,--output", cfg.output, "Report path (default stdout)");
  app.add_option("--records", cfg.records, "Line-delimited sample records");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return thermo::run(cfg, std::cout, std::cerr);
}
