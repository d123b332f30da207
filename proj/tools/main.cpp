#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tallip/cli.hpp"

namespace {

void add_common(CLI::App* cmd, tallip::RunConfig& cfg) {
  cmd->add_option("--epsilon", cfg.epsilon, "accuracy parameter");
  cmd->add_option("--seed", cfg.seed, "random seed (all randomness derives from it)");
  cmd->add_option("--report", cfg.report_path, "write the JSON report here (default stdout)");
  cmd->add_option("--threads", cfg.threads, "worker threads for dense kernels");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tallip: interior point solver for tall linear programs with "
               "sketched Newton oracles and a row-query cost ledger"};
  app.require_subcommand(1);

  tallip::RunConfig cfg;
  std::string mode = "sketched";

  auto* solve = app.add_subcommand("solve", "solve an LP by barrier path-following");
  solve->add_option("--input", cfg.input, "LP file (JSON or plain text)")->required();
  solve->add_option("--barrier", cfg.barrier, "log | volumetric | hybrid | lewis")
      ->check(CLI::IsMember({"log", "volumetric", "hybrid", "lewis"}));
  solve->add_option("--p", cfg.p, "Lewis barrier exponent (>= 4; 0 picks the default)");
  solve->add_option("--mode", mode, "exact | sketched")
      ->check(CLI::IsMember({"exact", "sketched"}));
  solve->add_option("--trace", cfg.trace_path, "write JSON-lines iteration trace here");
  add_common(solve, cfg);

  auto* sketch = app.add_subcommand("sketch", "spectral approximation of A'A by row sampling");
  sketch->add_option("--input", cfg.input, "LP file; the constraint matrix is sketched")
      ->required();
  add_common(sketch, cfg);

  auto* lewis = app.add_subcommand("lewis", "fixed-point-approximate lp-Lewis weights");
  lewis->add_option("--input", cfg.input, "LP file; weights of the constraint matrix")
      ->required();
  lewis->add_option("--p", cfg.p, "Lewis exponent (p >= 2)");
  add_common(lewis, cfg);

  auto* bench = app.add_subcommand(
      "bench", "measured classical row queries vs modeled quantum counts over an (n,d) grid");
  bench->add_option("--grid-n", cfg.grid_n, "row counts")->delimiter(',');
  bench->add_option("--grid-d", cfg.grid_d, "column counts")->delimiter(',');
  bench->add_option("--p", cfg.p, "Lewis exponent for the lewis rows");
  add_common(bench, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  cfg.sketched = (mode == "sketched");
  if (solve->parsed()) cfg.command = tallip::RunConfig::Command::Solve;
  if (sketch->parsed()) cfg.command = tallip::RunConfig::Command::Sketch;
  if (lewis->parsed()) cfg.command = tallip::RunConfig::Command::Lewis;
  if (bench->parsed()) cfg.command = tallip::RunConfig::Command::Bench;
  return tallip::run(cfg);
}
