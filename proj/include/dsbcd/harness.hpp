#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dsbcd/blockgeom.hpp"
#include "dsbcd/bounds.hpp"
#include "dsbcd/engine.hpp"
#include "dsbcd/network.hpp"
#include "dsbcd/oracle.hpp"

// Experiment orchestration: configuration files, multi-run grids over
// (N, T, algorithm), result tables and rate fits.

namespace dsbcd {

struct ExperimentConfig {
  // network
  ScheduleKind network_kind = ScheduleKind::RandomMetropolis;
  std::vector<int> agent_counts;        // N grid
  std::optional<double> delta;          // default: generator-implied floor
  int period = 1;                       // B
  std::uint64_t network_seed = 0;
  double extra_edge_prob = 0.3;         // random_metropolis density

  // space
  std::vector<FeasibleBlock> blocks;

  // objective
  std::optional<std::string> data_file; // fixed data instead of per-trial draw
  std::uint64_t objective_seed = 0;
  double noise_sigma = 0.0;

  // algorithm
  std::vector<Algorithm> algorithms;
  double theta = 1.0;
  Vector probabilities;

  // experiment grid
  std::vector<long> t_values;
  int num_runs = 1;
  int report_agent = 0;
  std::uint64_t master_seed = 0;
  double target_eps = 0.1;              // for the bounds report

  // telemetry (per-run CSV emission; costs a run-long record)
  bool telemetry_rounds = false;
  bool telemetry_objective = false;

  BlockSpec make_space() const;
  NetworkParams make_network_params(int num_agents) const;
  MixingSchedule make_schedule(int num_agents, std::uint64_t run_key) const;
};

// Strict parser: unknown keys and invariant violations are errors carrying
// the offending field path.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// The shipped sensor-network study configuration.
ExperimentConfig table1_config();
const std::string& table1_config_text();

struct AggregateCell {
  int num_agents = 0;
  long rounds = 0;
  Algorithm algorithm = Algorithm::Dsbcd;
  double mean_error = 0.0;
  double std_dev = 0.0;
  int runs = 0;
};

struct AggregateTable {
  std::vector<AggregateCell> cells;

  const AggregateCell* find(int num_agents, long rounds,
                            Algorithm algorithm) const;
};

// Deterministic seed splitting: one key per (N, T) cell, one per run; both
// algorithms of a cell share run keys so they face identical data, graphs
// and noise realizations.
std::uint64_t cell_key(std::uint64_t master_seed, int num_agents, long rounds);
std::uint64_t run_key(std::uint64_t cell, int run_index);

// Executes the full grid; per-run telemetry CSVs are written into
// telemetry_dir when the config enables them (empty = no files).
AggregateTable run_experiment(const ExperimentConfig& config,
                              std::uint64_t master_seed,
                              const std::string& telemetry_dir = {});

// Long-format CSV: num_agents,rounds,algorithm,mean_error,std_dev,runs.
void emit_table_csv(const AggregateTable& table, std::ostream& out);
AggregateTable parse_table_csv(std::istream& in);

// Table-1 style layout: one row per T, per-N algorithm column pairs.
void emit_table_markdown(const AggregateTable& table, std::ostream& out);

// Numbers are emitted at 6 decimals everywhere.
std::string format6(double v);

struct RateFit {
  double slope = 0.0;
  int points_used = 0;
  int points_excluded = 0;  // nonpositive errors: log undefined
};

// Least-squares slope of log(mean error) against log(T).
RateFit rate_fit(const std::vector<std::pair<long, double>>& points);

struct RateFitRow {
  int num_agents = 0;
  Algorithm algorithm = Algorithm::Dsbcd;
  RateFit fit;
};

std::vector<RateFitRow> rate_fits(const AggregateTable& table);

// Per-run telemetry CSV (k, agent, error, consensus_spread, proj_err_norm,
// sampled_block, projections).
void emit_run_telemetry_csv(const RunResult& result, std::ostream& out);

// Constants table for the `bounds` subcommand.
void emit_bounds_report(const ExperimentConfig& config, std::ostream& out);

}  // namespace dsbcd
