#include "dsbcd/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dsbcd {

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "dsbcd") return Algorithm::Dsbcd;
  if (name == "dsgd") return Algorithm::Dsgd;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(Algorithm algo) {
  return algo == Algorithm::Dsbcd ? "dsbcd" : "dsgd";
}

double stepsize(double theta, long k) {
  if (theta <= 0.0) throw std::invalid_argument("stepsize: theta must be > 0");
  if (k < 0) throw std::invalid_argument("stepsize: round must be >= 0");
  return theta / std::sqrt(static_cast<double>(k + 1));
}

void AlgoConfig::validate(const BlockSpec& spec, int num_agents) const {
  if (rounds < 1) throw std::invalid_argument("AlgoConfig: rounds must be >= 1");
  if (theta <= 0.0) throw std::invalid_argument("AlgoConfig: theta must be > 0");
  if (probabilities.size() != spec.block_count())
    throw std::invalid_argument(
        "AlgoConfig: need one probability per block");
  if ((probabilities.array() < 0.0).any() ||
      (probabilities.array() > 1.0).any() ||
      std::abs(probabilities.sum() - 1.0) > 1e-12)
    throw std::invalid_argument(
        "AlgoConfig: probabilities must lie on the simplex (within 1e-12)");
  if (initial_points.empty()) {
    if (!spec.is_feasible_full(Vector::Zero(spec.total_dim())))
      throw std::invalid_argument(
          "AlgoConfig: zero start is infeasible; supply initial_points");
    return;
  }
  if (static_cast<int>(initial_points.size()) != num_agents)
    throw std::invalid_argument(
        "AlgoConfig: need one initial point per agent");
  for (const Vector& x0 : initial_points) {
    if (!spec.is_feasible_full(x0))
      throw std::invalid_argument("AlgoConfig: infeasible initial point");
  }
}

RowMatrix consensus_step(const MixingSchedule& schedule, long k,
                         const RowMatrix& states) {
  if (states.rows() != schedule.params().num_agents)
    throw std::invalid_argument(
        "consensus_step: state row count != num_agents");
  RowMatrix y;
  schedule.apply(k, states, y);
  return y;
}

Engine::Engine(const BlockSpec& spec, const MixingSchedule& schedule,
               const ObjectiveSet& objective, NoiseModel noise,
               AlgoConfig config, std::uint64_t run_seed)
    : spec_(spec),
      schedule_(schedule),
      objective_(objective),
      noise_(noise),
      config_(std::move(config)),
      run_seed_(run_seed),
      num_agents_(schedule.params().num_agents) {
  if (objective_.num_agents() != num_agents_)
    throw std::invalid_argument("Engine: objective/network agent mismatch");
  if (objective_.dim() != spec_.total_dim())
    throw std::invalid_argument("Engine: objective/space dimension mismatch");
  config_.validate(spec_, num_agents_);

  prob_cumsum_.resize(config_.probabilities.size());
  double acc = 0.0;
  for (Eigen::Index s = 0; s < config_.probabilities.size(); ++s) {
    acc += config_.probabilities[s];
    prob_cumsum_[s] = acc;
  }
  prob_cumsum_[prob_cumsum_.size() - 1] = 1.0;

  const int n = spec_.total_dim();
  x_.setZero(num_agents_, n);
  if (!config_.initial_points.empty()) {
    for (int i = 0; i < num_agents_; ++i)
      x_.row(i) = config_.initial_points[static_cast<std::size_t>(i)];
  }
  y_.setZero(num_agents_, n);
  x_next_.setZero(num_agents_, n);
  grads_.setZero(num_agents_, n);
  sampled_.assign(static_cast<std::size_t>(num_agents_), -1);
  avg_accum_.setZero(num_agents_, n);
}

rng::Stream Engine::noise_stream(int agent) const {
  return {rng::derive(run_seed_, rng::purpose::kNoise,
                      static_cast<std::uint64_t>(agent),
                      static_cast<std::uint64_t>(round_))};
}

void Engine::dsbcd_round() {
  const double alpha = stepsize(config_.theta, round_);
  for (int i = 0; i < num_agents_; ++i) {
    // The block is sampled before the oracle query (the query needs to know
    // which block to evaluate); each draw comes from its own stream.
    const rng::Stream pick{rng::derive(run_seed_, rng::purpose::kBlockPick,
                                       static_cast<std::uint64_t>(i),
                                       static_cast<std::uint64_t>(round_))};
    const int zeta = pick.categorical(0, prob_cumsum_);
    sampled_[static_cast<std::size_t>(i)] = zeta;
    const int off = spec_.offset(zeta);
    const int n_s = spec_.size(zeta);

    // Subgradient evaluated at x_{i,k}, not at the consensus point.
    auto g = grads_.row(i).segment(off, n_s).transpose();
    block_stoch_subgradient_into(objective_, i, x_.row(i).transpose(), spec_,
                                 zeta, noise_, noise_stream(i), g);

    x_next_.row(i) = y_.row(i);
    auto out = x_next_.row(i).segment(off, n_s).transpose();
    spec_.block_project_into(zeta, y_.row(i).segment(off, n_s).transpose(), g,
                             alpha, out);
  }
}

void Engine::dsgd_round() {
  const double alpha = stepsize(config_.theta, round_);
  for (int i = 0; i < num_agents_; ++i) {
    auto g = grads_.row(i).transpose();
    stoch_subgradient_into(objective_, i, x_.row(i).transpose(), noise_,
                           noise_stream(i), g);
    for (int s = 0; s < spec_.block_count(); ++s) {
      const int off = spec_.offset(s);
      const int n_s = spec_.size(s);
      auto out = x_next_.row(i).segment(off, n_s).transpose();
      spec_.block_project_into(s, y_.row(i).segment(off, n_s).transpose(),
                               grads_.row(i).segment(off, n_s).transpose(),
                               alpha, out);
    }
  }
}

void Engine::step(const RoundObserver& observer) {
  try {
    schedule_.apply(round_, x_, y_);
    // Observers see zeros outside the sampled block.
    if (observer) grads_.setZero();
    if (config_.algorithm == Algorithm::Dsbcd) {
      dsbcd_round();
    } else {
      dsgd_round();
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("round " + std::to_string(round_) + ": " +
                             e.what());
  }

  if (observer) {
    RoundDetail detail;
    detail.round = round_;
    detail.alpha = stepsize(config_.theta, round_);
    detail.x_before = &x_;
    detail.y = &y_;
    detail.x_after = &x_next_;
    static const std::vector<int> kNoBlocks;
    detail.sampled_blocks =
        config_.algorithm == Algorithm::Dsbcd ? &sampled_ : &kNoBlocks;
    detail.grads = &grads_;
    observer(detail);
  }

  x_.swap(x_next_);
  ++round_;
  if (round_ <= config_.rounds) {
    // Output averages x_{i,1}..x_{i,T}; x_{i,0} is excluded.
    avg_accum_ += x_;
    ++avg_count_;
  }
}

RunResult Engine::run(const RunOptions& options) {
  RunResult result;
  result.rounds = config_.rounds;
  if (options.record_rounds)
    result.round_records.reserve(static_cast<std::size_t>(config_.rounds));
  if (options.record_states)
    result.state_history.reserve(static_cast<std::size_t>(config_.rounds));
  if (options.track_objective && !options.f_star.has_value())
    throw std::invalid_argument("run: track_objective requires f_star");

  while (round_ < config_.rounds) {
    RoundRecord record;
    if (options.record_rounds) {
      record.round = round_;
      double spread = 0.0;
      for (int i = 0; i < num_agents_; ++i)
        for (int j = i + 1; j < num_agents_; ++j)
          spread = std::max(spread, (x_.row(i) - x_.row(j)).norm());
      record.consensus_spread = spread;
      record.network_average = x_.colwise().mean().transpose();
      if (options.track_objective) {
        record.objective_error.resize(num_agents_);
        for (int i = 0; i < num_agents_; ++i)
          record.objective_error[i] =
              objective_.global_value(x_.row(i).transpose()) - *options.f_star;
      }
    }

    step(options.observer);

    if (options.record_rounds) {
      record.sampled_blocks =
          config_.algorithm == Algorithm::Dsbcd ? sampled_ : std::vector<int>{};
      record.projections_per_agent =
          config_.algorithm == Algorithm::Dsbcd ? 1 : spec_.block_count();
      record.proj_err_norm.resize(num_agents_);
      for (int i = 0; i < num_agents_; ++i)
        record.proj_err_norm[i] = (x_.row(i) - y_.row(i)).norm();
      result.round_records.push_back(std::move(record));
    }
    if (options.record_states) result.state_history.push_back(x_);
  }

  result.averaged = avg_accum_ / static_cast<double>(avg_count_);
  if (options.f_star.has_value()) {
    result.final_errors.resize(num_agents_);
    for (int i = 0; i < num_agents_; ++i)
      result.final_errors[i] =
          objective_.global_value(result.averaged.row(i).transpose()) -
          *options.f_star;
  }
  return result;
}

RunResult run(const BlockSpec& spec, const MixingSchedule& schedule,
              const ObjectiveSet& objective, const NoiseModel& noise,
              const AlgoConfig& config, std::uint64_t run_seed,
              const RunOptions& options) {
  Engine engine(spec, schedule, objective, noise, config, run_seed);
  return engine.run(options);
}

}  // namespace dsbcd
