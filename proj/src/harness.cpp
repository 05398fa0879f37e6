#include "dsbcd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dsbcd {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path,
                               const std::string& what) {
  throw std::runtime_error("config error at " + path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) config_error(path, "expected an object");
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      config_error(path + "." + item.key(), "unknown key");
    }
  }
}

const json& need(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) config_error(path + "." + key, "missing required key");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) config_error(path, "expected a number");
  return v.get<double>();
}

long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) config_error(path, "expected an integer");
  return v.get<long>();
}

Vector parse_bound(const json& v, int dim, const std::string& path) {
  if (v.is_number()) return Vector::Constant(dim, v.get<double>());
  if (v.is_array()) {
    if (static_cast<int>(v.size()) != dim)
      config_error(path, "expected " + std::to_string(dim) + " entries");
    Vector out(dim);
    for (int j = 0; j < dim; ++j)
      out[j] = as_number(v[static_cast<std::size_t>(j)],
                         path + "[" + std::to_string(j) + "]");
    return out;
  }
  config_error(path, "expected a number or an array");
}

FeasibleBlock parse_block(const json& v, const std::string& path) {
  check_keys(v, path, {"dim", "set", "dgf"});
  const int dim = static_cast<int>(as_integer(need(v, path, "dim"), path + ".dim"));
  if (dim < 1) config_error(path + ".dim", "must be >= 1");

  const json& set = need(v, path, "set");
  check_keys(set, path + ".set", {"type", "lo", "hi", "radius"});
  const json& type = need(set, path + ".set", "type");
  if (!type.is_string()) config_error(path + ".set.type", "expected a string");

  Dgf dgf = Dgf::Euclidean;
  if (auto it = v.find("dgf"); it != v.end()) {
    const std::string name = it->is_string() ? it->get<std::string>() : "";
    if (name == "euclidean") {
      dgf = Dgf::Euclidean;
    } else if (name == "entropy") {
      dgf = Dgf::Entropy;
    } else {
      config_error(path + ".dgf", "expected 'euclidean' or 'entropy'");
    }
  }

  const std::string kind = type.get<std::string>();
  try {
    if (kind == "box") {
      Vector lo = parse_bound(need(set, path + ".set", "lo"), dim,
                              path + ".set.lo");
      Vector hi = parse_bound(need(set, path + ".set", "hi"), dim,
                              path + ".set.hi");
      return box_block(std::move(lo), std::move(hi), dgf);
    }
    if (kind == "ball") {
      const double radius =
          as_number(need(set, path + ".set", "radius"), path + ".set.radius");
      FeasibleBlock b = ball_block(dim, radius);
      b.dgf = dgf;
      return b;
    }
    if (kind == "simplex") {
      return simplex_block(dim, dgf);
    }
  } catch (const std::invalid_argument& e) {
    config_error(path + ".set", e.what());
  }
  config_error(path + ".set.type", "expected 'box', 'ball' or 'simplex'");
}

std::string algo_label(Algorithm a) {
  return a == Algorithm::Dsbcd ? "DSBCD" : "DSGD";
}

}  // namespace

BlockSpec ExperimentConfig::make_space() const {
  return BlockSpec(blocks);
}

NetworkParams ExperimentConfig::make_network_params(int num_agents) const {
  NetworkParams p;
  p.num_agents = num_agents;
  p.period = period;
  if (delta.has_value()) {
    p.delta = *delta;
  } else if (num_agents == 1) {
    p.delta = 0.5;
  } else {
    // Probe the generator for the entry floor it actually guarantees.
    NetworkParams probe = p;
    probe.delta = 0.5 / num_agents;
    p.delta = MixingSchedule(network_kind, probe, 0, extra_edge_prob)
                  .implied_delta();
  }
  p.validate();
  return p;
}

MixingSchedule ExperimentConfig::make_schedule(int num_agents,
                                               std::uint64_t key) const {
  return MixingSchedule(network_kind, make_network_params(num_agents),
                        rng::derive(key, rng::purpose::kSchedule, network_seed),
                        extra_edge_prob);
}

ExperimentConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }
  check_keys(root, "$",
             {"network", "space", "objective", "algo", "t_values", "num_runs",
              "report_agent", "master_seed", "target_eps", "telemetry"});

  ExperimentConfig cfg;

  // network
  {
    const json& net = need(root, "$", "network");
    check_keys(net, "network",
               {"kind", "num_agents", "delta", "period", "seed",
                "extra_edge_prob"});
    const json& kind = need(net, "network", "kind");
    if (!kind.is_string()) config_error("network.kind", "expected a string");
    try {
      cfg.network_kind = schedule_kind_from_string(kind.get<std::string>());
    } catch (const std::invalid_argument& e) {
      config_error("network.kind", e.what());
    }
    const json& agents = need(net, "network", "num_agents");
    if (agents.is_number_integer()) {
      cfg.agent_counts.push_back(
          static_cast<int>(as_integer(agents, "network.num_agents")));
    } else if (agents.is_array() && !agents.empty()) {
      for (std::size_t i = 0; i < agents.size(); ++i)
        cfg.agent_counts.push_back(static_cast<int>(as_integer(
            agents[i], "network.num_agents[" + std::to_string(i) + "]")));
    } else {
      config_error("network.num_agents",
                   "expected an integer or a nonempty array");
    }
    for (int n : cfg.agent_counts)
      if (n < 1) config_error("network.num_agents", "agent counts must be >= 1");
    if (auto it = net.find("delta"); it != net.end()) {
      cfg.delta = as_number(*it, "network.delta");
      const int max_n =
          *std::max_element(cfg.agent_counts.begin(), cfg.agent_counts.end());
      if (!(*cfg.delta > 0.0 && *cfg.delta < 1.0) ||
          *cfg.delta > 1.0 / max_n + 1e-12)
        config_error("network.delta",
                     "must lie in (0,1) and not exceed 1/N for every N");
    }
    if (auto it = net.find("period"); it != net.end()) {
      cfg.period = static_cast<int>(as_integer(*it, "network.period"));
      if (cfg.period < 1) config_error("network.period", "must be >= 1");
    }
    if (auto it = net.find("seed"); it != net.end())
      cfg.network_seed =
          static_cast<std::uint64_t>(as_integer(*it, "network.seed"));
    if (auto it = net.find("extra_edge_prob"); it != net.end()) {
      cfg.extra_edge_prob = as_number(*it, "network.extra_edge_prob");
      if (cfg.extra_edge_prob < 0.0 || cfg.extra_edge_prob > 1.0)
        config_error("network.extra_edge_prob", "must lie in [0,1]");
    }
  }

  // space
  {
    const json& space = need(root, "$", "space");
    check_keys(space, "space", {"blocks"});
    const json& blocks = need(space, "space", "blocks");
    if (!blocks.is_array() || blocks.empty())
      config_error("space.blocks", "expected a nonempty array");
    for (std::size_t s = 0; s < blocks.size(); ++s)
      cfg.blocks.push_back(parse_block(
          blocks[s], "space.blocks[" + std::to_string(s) + "]"));
    try {
      BlockSpec probe(cfg.blocks);
    } catch (const std::invalid_argument& e) {
      config_error("space.blocks", e.what());
    }
  }

  // objective
  {
    const json& obj = need(root, "$", "objective");
    check_keys(obj, "objective",
               {"generator_seed", "data_file", "noise_sigma"});
    const bool has_seed = obj.contains("generator_seed");
    const bool has_file = obj.contains("data_file");
    if (has_seed && has_file)
      config_error("objective",
                   "specify either generator_seed or data_file, not both");
    if (has_seed)
      cfg.objective_seed = static_cast<std::uint64_t>(
          as_integer(obj["generator_seed"], "objective.generator_seed"));
    if (has_file) {
      if (!obj["data_file"].is_string())
        config_error("objective.data_file", "expected a string");
      cfg.data_file = obj["data_file"].get<std::string>();
    }
    if (auto it = obj.find("noise_sigma"); it != obj.end()) {
      cfg.noise_sigma = as_number(*it, "objective.noise_sigma");
      if (cfg.noise_sigma < 0.0)
        config_error("objective.noise_sigma", "must be >= 0");
    }
  }

  // algo
  {
    const json& algo = need(root, "$", "algo");
    check_keys(algo, "algo", {"algorithms", "theta", "probabilities"});
    const json& algos = need(algo, "algo", "algorithms");
    if (!algos.is_array() || algos.empty())
      config_error("algo.algorithms", "expected a nonempty array");
    for (std::size_t i = 0; i < algos.size(); ++i) {
      if (!algos[i].is_string())
        config_error("algo.algorithms[" + std::to_string(i) + "]",
                     "expected a string");
      try {
        cfg.algorithms.push_back(
            algorithm_from_string(algos[i].get<std::string>()));
      } catch (const std::invalid_argument& e) {
        config_error("algo.algorithms[" + std::to_string(i) + "]", e.what());
      }
    }
    if (auto it = algo.find("theta"); it != algo.end()) {
      cfg.theta = as_number(*it, "algo.theta");
      if (cfg.theta <= 0.0) config_error("algo.theta", "must be > 0");
    }
    const json& probs = need(algo, "algo", "probabilities");
    if (!probs.is_array() || probs.empty())
      config_error("algo.probabilities", "expected a nonempty array");
    cfg.probabilities.resize(static_cast<Eigen::Index>(probs.size()));
    for (std::size_t s = 0; s < probs.size(); ++s)
      cfg.probabilities[static_cast<Eigen::Index>(s)] = as_number(
          probs[s], "algo.probabilities[" + std::to_string(s) + "]");
    if ((cfg.probabilities.array() < 0.0).any() ||
        (cfg.probabilities.array() > 1.0).any() ||
        std::abs(cfg.probabilities.sum() - 1.0) > 1e-12)
      config_error("algo.probabilities",
                   "must lie on the probability simplex (within 1e-12)");
    if (cfg.probabilities.size() != static_cast<Eigen::Index>(cfg.blocks.size()))
      config_error("algo.probabilities", "need one probability per block");
  }

  // grid
  {
    const json& ts = need(root, "$", "t_values");
    if (!ts.is_array() || ts.empty())
      config_error("t_values", "expected a nonempty array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const long t =
          as_integer(ts[i], "t_values[" + std::to_string(i) + "]");
      if (t < 1) config_error("t_values", "rounds must be >= 1");
      cfg.t_values.push_back(t);
    }
    if (auto it = root.find("num_runs"); it != root.end()) {
      cfg.num_runs = static_cast<int>(as_integer(*it, "num_runs"));
      if (cfg.num_runs < 1) config_error("num_runs", "must be >= 1");
    }
    if (auto it = root.find("report_agent"); it != root.end()) {
      cfg.report_agent = static_cast<int>(as_integer(*it, "report_agent"));
      const int min_n =
          *std::min_element(cfg.agent_counts.begin(), cfg.agent_counts.end());
      if (cfg.report_agent < 0 || cfg.report_agent >= min_n)
        config_error("report_agent", "must index an agent for every N");
    }
    if (auto it = root.find("master_seed"); it != root.end())
      cfg.master_seed =
          static_cast<std::uint64_t>(as_integer(*it, "master_seed"));
    if (auto it = root.find("target_eps"); it != root.end()) {
      cfg.target_eps = as_number(*it, "target_eps");
      if (cfg.target_eps <= 0.0) config_error("target_eps", "must be > 0");
    }
    if (auto it = root.find("telemetry"); it != root.end()) {
      check_keys(*it, "telemetry", {"rounds", "objective"});
      if (auto r = it->find("rounds"); r != it->end()) {
        if (!r->is_boolean()) config_error("telemetry.rounds", "expected a bool");
        cfg.telemetry_rounds = r->get<bool>();
      }
      if (auto o = it->find("objective"); o != it->end()) {
        if (!o->is_boolean())
          config_error("telemetry.objective", "expected a bool");
        cfg.telemetry_objective = o->get<bool>();
      }
    }
  }

  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

const std::string& table1_config_text() {
  static const std::string text = R"json({
  "network": {
    "kind": "random_metropolis",
    "num_agents": [5, 15, 30],
    "period": 1,
    "seed": 0,
    "extra_edge_prob": 0.1
  },
  "space": {
    "blocks": [
      {"dim": 5, "set": {"type": "box", "lo": -1.0, "hi": 1.0}, "dgf": "euclidean"},
      {"dim": 5, "set": {"type": "box", "lo": -1.0, "hi": 1.0}, "dgf": "euclidean"}
    ]
  },
  "objective": {
    "generator_seed": 0,
    "noise_sigma": 1.0
  },
  "algo": {
    "algorithms": ["dsbcd", "dsgd"],
    "theta": 1.0,
    "probabilities": [0.5, 0.5]
  },
  "t_values": [800, 1500, 3000, 4000, 8000],
  "num_runs": 30,
  "report_agent": 0,
  "master_seed": 42
}
)json";
  return text;
}

ExperimentConfig table1_config() {
  return parse_config_text(table1_config_text());
}

const AggregateCell* AggregateTable::find(int num_agents, long rounds,
                                          Algorithm algorithm) const {
  for (const AggregateCell& cell : cells) {
    if (cell.num_agents == num_agents && cell.rounds == rounds &&
        cell.algorithm == algorithm)
      return &cell;
  }
  return nullptr;
}

std::uint64_t cell_key(std::uint64_t master_seed, int num_agents,
                       long rounds) {
  return rng::derive(master_seed, rng::purpose::kCell,
                     static_cast<std::uint64_t>(num_agents),
                     static_cast<std::uint64_t>(rounds));
}

std::uint64_t run_key(std::uint64_t cell, int run_index) {
  return rng::derive(cell, rng::purpose::kRun,
                     static_cast<std::uint64_t>(run_index));
}

AggregateTable run_experiment(const ExperimentConfig& config,
                              std::uint64_t master_seed,
                              const std::string& telemetry_dir) {
  const BlockSpec spec = config.make_space();
  const NoiseModel noise = NoiseModel::gaussian(config.noise_sigma);

  std::unique_ptr<QuadraticSensorObjective> fixed;
  if (config.data_file.has_value()) {
    fixed = std::make_unique<QuadraticSensorObjective>(
        QuadraticSensorObjective::load(*config.data_file));
    if (fixed->dim() != spec.total_dim())
      throw std::runtime_error(
          "objective data file dimension does not match the space");
  }

  const bool want_telemetry =
      !telemetry_dir.empty() &&
      (config.telemetry_rounds || config.telemetry_objective);
  if (want_telemetry)
    std::filesystem::create_directories(telemetry_dir);

  AggregateTable table;
  for (int n_agents : config.agent_counts) {
    if (fixed && fixed->num_agents() != n_agents)
      throw std::runtime_error(
          "objective data file has " + std::to_string(fixed->num_agents()) +
          " agents but the grid asks for " + std::to_string(n_agents));
    for (long t : config.t_values) {
      const std::uint64_t ck = cell_key(master_seed, n_agents, t);
      for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
        const Algorithm algo = config.algorithms[a];
        Vector errors(config.num_runs);

        for (int r = 0; r < config.num_runs; ++r) {
          const std::uint64_t rk = run_key(ck, r);

          std::unique_ptr<QuadraticSensorObjective> generated;
          const QuadraticSensorObjective* objective = fixed.get();
          if (objective == nullptr) {
            generated = std::make_unique<QuadraticSensorObjective>(
                QuadraticSensorObjective::generate(
                    n_agents, spec.total_dim(),
                    rng::Stream{rng::derive(rk, rng::purpose::kObjective,
                                            config.objective_seed)}));
            objective = generated.get();
          }
          const Optimum opt = objective->exact_optimum(spec);

          const MixingSchedule schedule = config.make_schedule(n_agents, rk);

          AlgoConfig algo_cfg;
          algo_cfg.algorithm = algo;
          algo_cfg.rounds = t;
          algo_cfg.theta = config.theta;
          algo_cfg.probabilities = config.probabilities;

          RunOptions options;
          options.f_star = opt.value;
          options.record_rounds = want_telemetry && config.telemetry_rounds;
          options.track_objective =
              want_telemetry && config.telemetry_objective;

          // Both algorithms of a cell share the engine seed: identical
          // data, graphs and noise realizations (paired comparison).
          const RunResult result =
              run(spec, schedule, *objective, noise, algo_cfg,
                  rng::derive(rk, rng::purpose::kEngine), options);
          errors[r] = result.final_errors[config.report_agent];

          if (want_telemetry) {
            std::ostringstream name;
            name << telemetry_dir << "/run_N" << n_agents << "_T" << t << "_"
                 << to_string(algo) << "_r" << r << ".csv";
            std::ofstream out(name.str());
            emit_run_telemetry_csv(result, out);
          }
        }

        AggregateCell cell;
        cell.num_agents = n_agents;
        cell.rounds = t;
        cell.algorithm = algo;
        cell.runs = config.num_runs;
        cell.mean_error = errors.mean();
        cell.std_dev =
            config.num_runs > 1
                ? std::sqrt((errors.array() - cell.mean_error).square().sum() /
                            (config.num_runs - 1))
                : 0.0;
        table.cells.push_back(cell);
      }
    }
  }
  return table;
}

std::string format6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void emit_table_csv(const AggregateTable& table, std::ostream& out) {
  out << "num_agents,rounds,algorithm,mean_error,std_dev,runs\n";
  for (const AggregateCell& cell : table.cells) {
    out << cell.num_agents << ',' << cell.rounds << ','
        << to_string(cell.algorithm) << ',' << format6(cell.mean_error) << ','
        << format6(cell.std_dev) << ',' << cell.runs << '\n';
  }
}

AggregateTable parse_table_csv(std::istream& in) {
  AggregateTable table;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("table csv: empty input");
  if (line != "num_agents,rounds,algorithm,mean_error,std_dev,runs")
    throw std::runtime_error("table csv: unexpected header: " + line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    AggregateCell cell;
    auto next = [&]() {
      if (!std::getline(ls, field, ','))
        throw std::runtime_error("table csv: short row: " + line);
      return field;
    };
    cell.num_agents = std::stoi(next());
    cell.rounds = std::stol(next());
    cell.algorithm = algorithm_from_string(next());
    cell.mean_error = std::stod(next());
    cell.std_dev = std::stod(next());
    cell.runs = std::stoi(next());
    table.cells.push_back(cell);
  }
  return table;
}

void emit_table_markdown(const AggregateTable& table, std::ostream& out) {
  std::vector<int> agent_counts;
  std::vector<long> t_values;
  std::vector<Algorithm> algorithms;
  for (const AggregateCell& cell : table.cells) {
    if (std::find(agent_counts.begin(), agent_counts.end(), cell.num_agents) ==
        agent_counts.end())
      agent_counts.push_back(cell.num_agents);
    if (std::find(t_values.begin(), t_values.end(), cell.rounds) ==
        t_values.end())
      t_values.push_back(cell.rounds);
    if (std::find(algorithms.begin(), algorithms.end(), cell.algorithm) ==
        algorithms.end())
      algorithms.push_back(cell.algorithm);
  }
  std::sort(t_values.begin(), t_values.end());

  out << "| T |";
  for (int n : agent_counts)
    for (Algorithm a : algorithms)
      out << " N=" << n << ' ' << algo_label(a) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < agent_counts.size() * algorithms.size(); ++i)
    out << "---|";
  out << '\n';
  for (long t : t_values) {
    out << "| " << t << " |";
    for (int n : agent_counts) {
      for (Algorithm a : algorithms) {
        const AggregateCell* cell = table.find(n, t, a);
        if (cell) {
          out << ' ' << format6(cell->mean_error) << " |";
        } else {
          out << " - |";
        }
      }
    }
    out << '\n';
  }
}

RateFit rate_fit(const std::vector<std::pair<long, double>>& points) {
  RateFit fit;
  double sx = 0.0, sy = 0.0;
  std::vector<std::pair<double, double>> usable;
  for (const auto& [t, err] : points) {
    if (err <= 0.0) {
      ++fit.points_excluded;
      continue;
    }
    usable.emplace_back(std::log(static_cast<double>(t)), std::log(err));
    sx += usable.back().first;
    sy += usable.back().second;
  }
  fit.points_used = static_cast<int>(usable.size());
  if (fit.points_used < 2)
    throw std::invalid_argument(
        "rate_fit: need at least two positive error points");
  const double mx = sx / fit.points_used;
  const double my = sy / fit.points_used;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : usable) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("rate_fit: need at least two distinct T");
  fit.slope = sxy / sxx;
  return fit;
}

std::vector<RateFitRow> rate_fits(const AggregateTable& table) {
  std::vector<RateFitRow> rows;
  for (const AggregateCell& cell : table.cells) {
    if (std::find_if(rows.begin(), rows.end(), [&](const RateFitRow& r) {
          return r.num_agents == cell.num_agents &&
                 r.algorithm == cell.algorithm;
        }) != rows.end())
      continue;
    std::vector<std::pair<long, double>> points;
    for (const AggregateCell& other : table.cells) {
      if (other.num_agents == cell.num_agents &&
          other.algorithm == cell.algorithm)
        points.emplace_back(other.rounds, other.mean_error);
    }
    RateFitRow row;
    row.num_agents = cell.num_agents;
    row.algorithm = cell.algorithm;
    row.fit = rate_fit(points);
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_run_telemetry_csv(const RunResult& result, std::ostream& out) {
  out << "k,agent,error,consensus_spread,proj_err_norm,sampled_block,"
         "projections\n";
  for (const RoundRecord& record : result.round_records) {
    for (Eigen::Index i = 0; i < record.proj_err_norm.size(); ++i) {
      out << record.round << ',' << i << ',';
      if (record.objective_error.size() > i)
        out << format6(record.objective_error[i]);
      out << ',' << format6(record.consensus_spread) << ','
          << format6(record.proj_err_norm[i]) << ',';
      if (!record.sampled_blocks.empty())
        out << record.sampled_blocks[static_cast<std::size_t>(i)];
      else
        out << -1;
      out << ',' << record.projections_per_agent << '\n';
    }
  }
}

void emit_bounds_report(const ExperimentConfig& config, std::ostream& out) {
  const BlockSpec spec = config.make_space();
  const NoiseModel noise = NoiseModel::gaussian(config.noise_sigma);
  const BlockDiameter diameter = spec.diameter_bound();

  SubgradBounds subgrad;
  if (config.data_file.has_value()) {
    const QuadraticSensorObjective obj =
        QuadraticSensorObjective::load(*config.data_file);
    subgrad = analytic_bounds(obj, spec, noise);
  } else {
    subgrad = generator_bounds(spec, noise);
  }

  out << "blocks = " << spec.block_count() << '\n';
  out << "total_dim = " << spec.total_dim() << '\n';
  for (int s = 0; s < spec.block_count(); ++s) {
    out << "d_squared[" << s << "] = " << diameter.d_squared[s] << '\n';
    out << "m_bar[" << s << "] = " << subgrad.per_block[s] << '\n';
  }
  out << "d_m_squared = " << diameter.total() << '\n';
  out << "m1 = " << subgrad.m1 << '\n';
  out << "m2 = " << subgrad.m2 << '\n';

  for (int n_agents : config.agent_counts) {
    const NetworkParams params = config.make_network_params(n_agents);
    const ErgodicityConstants erg = ergodicity_constants(params);
    const BoundInputs in = assemble_bound_inputs(
        params, subgrad, diameter, config.probabilities, config.theta);
    const std::string prefix = "N" + std::to_string(n_agents) + ".";
    out << prefix << "delta = " << params.delta << '\n';
    out << prefix << "gamma_big = " << erg.gamma_big << '\n';
    out << prefix << "gamma = " << erg.gamma << '\n';
    const bool uniform =
        (in.probabilities.array() - 1.0 / in.num_blocks).abs().maxCoeff() <=
        1e-9;
    if (uniform) {
      out << prefix << "C = " << rate_constant_c(in) << '\n';
      out << prefix << "C_min = " << min_rate_constant(in) << '\n';
    }
    out << prefix << "theta_star = " << optimal_theta(in) << '\n';
    const Complexity cx = complexity_t(in, config.target_eps);
    out << prefix << "kappa = " << cx.kappa << '\n';
    out << prefix << "T(eps=" << config.target_eps << ") = " << cx.rounds
        << '\n';
    for (long t : config.t_values) {
      const Thm1Bound thm1 = error_bound_thm1(in, t);
      out << prefix << "T" << t << ".E1 = " << thm1.e1 << '\n';
      out << prefix << "T" << t << ".E2 = " << thm1.e2 << '\n';
      if (uniform)
        out << prefix << "T" << t << ".C_over_sqrtT = "
            << rate_constant_c(in) / std::sqrt(static_cast<double>(t)) << '\n';
    }
  }
}

}  // namespace dsbcd
