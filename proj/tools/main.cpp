#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "dsbcd/harness.hpp"

namespace {

int write_outputs(const dsbcd::AggregateTable& table, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream csv(out_dir + "/aggregate.csv");
    if (!csv) {
      std::cerr << "cannot write " << out_dir << "/aggregate.csv\n";
      return 1;
    }
    dsbcd::emit_table_csv(table, csv);
  }
  {
    std::ofstream md(out_dir + "/table.md");
    dsbcd::emit_table_markdown(table, md);
  }
  dsbcd::emit_table_markdown(table, std::cout);
  std::cout << "wrote " << out_dir << "/aggregate.csv and " << out_dir
            << "/table.md\n";
  return 0;
}

int run_table(const dsbcd::ExperimentConfig& config, std::optional<std::uint64_t> seed,
              const std::string& out_dir) {
  const std::uint64_t master = seed.value_or(config.master_seed);
  const std::string telemetry_dir =
      (config.telemetry_rounds || config.telemetry_objective)
          ? out_dir + "/telemetry"
          : std::string{};
  const dsbcd::AggregateTable table =
      dsbcd::run_experiment(config, master, telemetry_dir);
  return write_outputs(table, out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed stochastic block coordinate descent simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string csv_path;
  long horizon = 200;
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand(
      "run", "run the experiment grid described by a config file");
  run_cmd->add_option("--config", config_path, "config file (json)")
      ->required();
  run_cmd->add_option("--seed", seed, "master seed (default: from config)");
  run_cmd->add_option("--out", out_dir, "output directory");

  auto* table1_cmd = app.add_subcommand(
      "table1", "run the shipped sensor-network comparison study");
  table1_cmd->add_option("--seed", seed, "master seed (default: from config)");
  table1_cmd->add_option("--out", out_dir, "output directory");

  auto* bounds_cmd = app.add_subcommand(
      "bounds", "print the convergence constants for a config");
  bounds_cmd->add_option("--config", config_path, "config file (json)")
      ->required();

  auto* validate_cmd = app.add_subcommand(
      "validate-network", "check the mixing schedule over a horizon");
  validate_cmd->add_option("--config", config_path, "config file (json)")
      ->required();
  validate_cmd->add_option("--horizon", horizon, "rounds to check");

  auto* rate_cmd = app.add_subcommand(
      "rate-fit", "fit log-log slopes from an aggregate csv");
  rate_cmd->add_option("--in", csv_path, "aggregate csv file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return run_table(dsbcd::parse_config(config_path), seed, out_dir);
    }
    if (table1_cmd->parsed()) {
      return run_table(dsbcd::table1_config(), seed, out_dir);
    }
    if (bounds_cmd->parsed()) {
      dsbcd::emit_bounds_report(dsbcd::parse_config(config_path), std::cout);
      return 0;
    }
    if (validate_cmd->parsed()) {
      const dsbcd::ExperimentConfig config = dsbcd::parse_config(config_path);
      bool all_valid = true;
      for (int n : config.agent_counts) {
        const dsbcd::MixingSchedule schedule = config.make_schedule(
            n, dsbcd::run_key(dsbcd::cell_key(config.master_seed, n, 0), 0));
        const dsbcd::ValidationReport report =
            dsbcd::validate_schedule(schedule, horizon);
        std::cout << "N=" << n << " kind=" << to_string(schedule.kind())
                  << " delta=" << schedule.params().delta
                  << " horizon=" << horizon << ": " << report.message << '\n';
        all_valid = all_valid && report.valid;
      }
      return all_valid ? 0 : 2;
    }
    if (rate_cmd->parsed()) {
      std::ifstream in(csv_path);
      if (!in) {
        std::cerr << "cannot open " << csv_path << '\n';
        return 1;
      }
      const dsbcd::AggregateTable table = dsbcd::parse_table_csv(in);
      for (const dsbcd::RateFitRow& row : dsbcd::rate_fits(table)) {
        std::cout << "N=" << row.num_agents << " "
                  << to_string(row.algorithm) << ": slope="
                  << dsbcd::format6(row.fit.slope)
                  << " points=" << row.fit.points_used
                  << " excluded=" << row.fit.points_excluded << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
