#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dsbcd/blockgeom.hpp"
#include "dsbcd/network.hpp"
#include "dsbcd/oracle.hpp"

// Synchronous rounds of consensus + stochastic (block) projection:
//   y_{i,k}     = sum_j [P_k]_{ij} x_{j,k}
//   dsbcd:        one block zeta_{i,k} ~ p projected, the rest copied from y
//   dsgd:         full subgradient, every block projected
// with stepsizes alpha_k = theta / sqrt(k+1) and running-average outputs
// xhat_i = (1/T) sum_{k=1..T} x_{i,k}.

namespace dsbcd {

enum class Algorithm { Dsbcd, Dsgd };

Algorithm algorithm_from_string(const std::string& name);
std::string to_string(Algorithm algo);

double stepsize(double theta, long k);

struct AlgoConfig {
  Algorithm algorithm = Algorithm::Dsbcd;
  long rounds = 1;      // T
  double theta = 1.0;   // alpha_k = theta / sqrt(k+1)
  Vector probabilities; // p_1..p_b on the simplex (within 1e-12)
  // Per-agent feasible starts; empty means all zeros (zero must then be
  // feasible).
  std::vector<Vector> initial_points;

  void validate(const BlockSpec& spec, int num_agents) const;
};

// y = P x with per-agent rows; network average is preserved by double
// stochasticity. Exposed separately for tests and the bindings.
RowMatrix consensus_step(const MixingSchedule& schedule, long k,
                         const RowMatrix& states);

// Everything one round produced, passed to observers: the subgradient draw
// is evaluated at x_before (not y), the projection error e_i = x_after_i -
// y_i is supported on the sampled block only (dsbcd).
struct RoundDetail {
  long round = 0;
  double alpha = 0.0;
  const RowMatrix* x_before = nullptr;
  const RowMatrix* y = nullptr;
  const RowMatrix* x_after = nullptr;
  // dsbcd: the sampled block per agent; dsgd: empty.
  const std::vector<int>* sampled_blocks = nullptr;
  // dsbcd: rows hold the sampled block's stochastic subgradient in the
  // block's coordinates (other columns zero); dsgd: the full subgradient.
  const RowMatrix* grads = nullptr;
};

using RoundObserver = std::function<void(const RoundDetail&)>;

struct RoundRecord {
  long round = 0;
  std::vector<int> sampled_blocks;   // empty for dsgd
  Vector proj_err_norm;              // ||x_{i,k+1} - y_{i,k}|| per agent
  int projections_per_agent = 1;     // 1 for dsbcd, b for dsgd
  double consensus_spread = 0.0;     // max_{i,j} ||x_{i,k} - x_{j,k}||
  Vector network_average;            // xbar_k
  Vector objective_error;            // f(x_{i,k}) - f*, when tracked
};

struct RunOptions {
  bool record_rounds = false;
  bool record_states = false;        // keep x_{i,k} for k = 1..T
  bool track_objective = false;      // per-round f(x_{i,k}) - f* (costly)
  std::optional<double> f_star;
  RoundObserver observer;
};

struct RunResult {
  long rounds = 0;
  RowMatrix averaged;                // xhat_i rows
  Vector final_errors;               // f(xhat_i) - f*, when f_star known
  std::vector<RoundRecord> round_records;
  std::vector<RowMatrix> state_history;
};

class Engine {
 public:
  Engine(const BlockSpec& spec, const MixingSchedule& schedule,
         const ObjectiveSet& objective, NoiseModel noise, AlgoConfig config,
         std::uint64_t run_seed);

  long round() const { return round_; }
  int num_agents() const { return num_agents_; }
  const RowMatrix& states() const { return x_; }
  const AlgoConfig& config() const { return config_; }

  // Advance one round; aborts carry round and agent context.
  void step(const RoundObserver& observer = nullptr);

  // Execute the remaining rounds and assemble outputs/telemetry.
  RunResult run(const RunOptions& options = {});

 private:
  void dsbcd_round();
  void dsgd_round();
  rng::Stream noise_stream(int agent) const;

  const BlockSpec& spec_;
  const MixingSchedule& schedule_;
  const ObjectiveSet& objective_;
  NoiseModel noise_;
  AlgoConfig config_;
  std::uint64_t run_seed_;
  int num_agents_;
  long round_ = 0;

  Vector prob_cumsum_;
  RowMatrix x_;       // current iterates, one row per agent
  RowMatrix y_;       // post-consensus
  RowMatrix x_next_;
  RowMatrix grads_;   // per-round stochastic (block) subgradients
  std::vector<int> sampled_;
  RowMatrix avg_accum_;
  long avg_count_ = 0;
};

// One-call convenience wrapper.
RunResult run(const BlockSpec& spec, const MixingSchedule& schedule,
              const ObjectiveSet& objective, const NoiseModel& noise,
              const AlgoConfig& config, std::uint64_t run_seed,
              const RunOptions& options = {});

}  // namespace dsbcd
