// Command-line front end: validate | analytic | simulate | compare | ladder-diag.
// Every subcommand takes a scenario JSON file and an optional output directory.
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 statistical check failure.

#include <string>

#include <CLI11.hpp>

#include "levyrisk/levyrisk.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Supremum laws for killed generalized risk processes"};
  app.set_version_flag("--version", std::string(levyrisk::kVersion));
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  unsigned threads = 1;
  double beta_max = 1e6;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("scenario", scenario, "Scenario JSON file")->required();
    if (with_out) cmd->add_option("--out", out_dir, "Output directory (defaults to the scenario's output_dir)");
  };

  auto* validate = app.add_subcommand("validate", "Check a scenario and report model diagnostics");
  add_common(validate, false);

  auto* analytic = app.add_subcommand("analytic", "Evaluate the supremum CDF via the series");
  add_common(analytic, true);

  auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo and write path summaries");
  add_common(simulate, true);
  simulate->add_option("--threads", threads, "Worker threads (results do not depend on this)");

  auto* compare = app.add_subcommand("compare", "Simulate, evaluate the series, and run all checks");
  add_common(compare, true);
  compare->add_option("--threads", threads, "Worker threads (results do not depend on this)");

  auto* ladder = app.add_subcommand("ladder-diag", "Sweep the descending ladder exponent diagnostics");
  add_common(ladder, true);
  ladder->add_option("--beta-max", beta_max, "Largest beta in the sweep (default 1e6)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? levyrisk::kExitOk : levyrisk::kExitConfig;
  }

  if (validate->parsed()) return levyrisk::cmd_validate(scenario);
  if (analytic->parsed()) return levyrisk::cmd_analytic(scenario, out_dir);
  if (simulate->parsed()) return levyrisk::cmd_simulate(scenario, out_dir, threads);
  if (compare->parsed()) return levyrisk::cmd_compare(scenario, out_dir, threads);
  if (ladder->parsed()) return levyrisk::cmd_ladder_diag(scenario, out_dir, beta_max);
  return levyrisk::kExitConfig;
}
