// mtw-kit: batch front end for cost, curvature and condition checks.
//
//   mtw-kit run job.json [--seed N] [--n-samples N] [--workers N] [--csv P] [--summary P]
//   mtw-kit validate job.json

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mtw/job.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> n_samples;
  std::optional<int> workers;
  std::optional<std::string> csv;
  std::optional<std::string> summary;

  void apply(nlohmann::json& config) const {
    if (!config.is_object()) return;
    if (seed) config["seed"] = *seed;
    if (n_samples) config["n_samples"] = *n_samples;
    if (workers) config["workers"] = *workers;
    if (csv) config["output"]["csv"] = *csv;
    if (summary) config["output"]["summary"] = *summary;
  }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Override the sampling seed");
  cmd->add_option("--n-samples", o.n_samples, "Override the sample count");
  cmd->add_option("--workers", o.workers, "Worker threads (0 = all processors)");
  cmd->add_option("--csv", o.csv, "Override the CSV output path");
  cmd->add_option("--summary", o.summary, "Override the summary output path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-curvature and MTW condition checks for mechanical-action costs"};
  app.require_subcommand(1);

  std::string run_path, validate_path;
  Overrides run_over, validate_over;

  CLI::App* run_cmd = app.add_subcommand("run", "Run the job described by a config file");
  run_cmd->add_option("config", run_path, "Job config (JSON)")->required();
  add_overrides(run_cmd, run_over);

  CLI::App* val_cmd = app.add_subcommand("validate", "Check a config file without running it");
  val_cmd->add_option("config", validate_path, "Job config (JSON)")->required();
  add_overrides(val_cmd, validate_over);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const bool running = run_cmd->parsed();
  nlohmann::json config;
  try {
    config = mtw::load_config(running ? run_path : validate_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  (running ? run_over : validate_over).apply(config);

  if (running) return mtw::run(config, std::cout, std::cerr);

  const auto diags = mtw::validate(config);
  for (const auto& d : diags) std::cout << d.message() << '\n';
  if (diags.empty()) std::cout << "ok\n";
  return diags.empty() ? 0 : 1;
}
