#include <string>
#include <vector>

#include "CLI11.hpp"
#include "alexlab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"alexlab: inequality experiments on polyhedral cone surfaces"};
  app.require_subcommand(1);

  std::string cfg, out;
  auto* run = app.add_subcommand("run", "run one experiment config");
  run->add_option("config", cfg, "config file")->required();
  run->add_option("-o,--output", out, "output directory (default from the config)");

  std::string dir, suite_out;
  int threads = 0;
  auto* suite = app.add_subcommand("suite", "run every *.cfg of a directory and write summary.csv");
  suite->add_option("dir", dir, "config directory")->required();
  suite->add_option("-o,--output", suite_out, "directory for reports and summary.csv");
  suite->add_option("-j,--threads", threads, "parallel runs (default ALEXLAB_THREADS or all cores)");

  std::string generator, mesh_out;
  std::vector<std::string> params;
  auto* mesh = app.add_subcommand("mesh", "write a generated surface as OFF");
  mesh->add_option("generator", generator, "flat_disk, cone_disk, flat_torus or icosphere")->required();
  mesh->add_option("params", params, "key=value generator parameters");
  mesh->add_option("-o,--output", mesh_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (*run) return alexlab::cli::run_command(cfg, out);
  if (*suite) return alexlab::cli::suite_command(dir, suite_out, threads);
  return alexlab::cli::mesh_command(generator, params, mesh_out);
}
