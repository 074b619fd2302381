#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "hawking/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hawking mass laboratory for perturbed geodesic spheres"};
  app.set_version_flag("--version", std::string(hawking::kToolVersion));
  app.require_subcommand(1, 1);

  const std::map<std::string, std::string> help = {
      {"integrals-check", "quadrature identities on the sphere grid"},
      {"curvature", "curvature packet and consistency checks at the configured point"},
      {"expansion", "small-sphere ladder and fit of the c3, c5 coefficients"},
      {"optimize", "constrained ascent of the Hawking mass over l >= 2 perturbations"},
      {"bartnik", "scalar curvature sign and Bartnik-type lower bound"},
      {"el-residual", "Euler-Lagrange residual of the optimal perturbation along the ladder"}};

  std::string config_path, out_dir;
  for (const auto& [name, _] : hawking::command_table()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "directory for JSON and CSV outputs (default: output.dir of the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? hawking::kExitOk : hawking::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  hawking::RunConfig cfg;
  try {
    cfg = hawking::load_config(config_path);
  } catch (const hawking::Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
    return hawking::kExitConfig;
  }
  if (out_dir.empty()) out_dir = cfg.output_dir;
  return hawking::run_command(command, cfg, out_dir, std::cout, std::cerr);
}
