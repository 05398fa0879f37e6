#include "dsbcd/oracle.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace dsbcd {

NoiseModel NoiseModel::gaussian(double sigma) {
  if (sigma < 0.0)
    throw std::invalid_argument("NoiseModel: sigma must be nonnegative");
  return {sigma};
}

void ObjectiveSet::block_subgradient(int agent, ConstVecRef x, int offset,
                                     int size, VecRef out) const {
  Vector full(x.size());
  subgradient(agent, x, full);
  out = full.segment(offset, size);
}

double ObjectiveSet::global_value(ConstVecRef x) const {
  double v = 0.0;
  for (int i = 0; i < num_agents(); ++i) v += value(i, x);
  return v;
}

Vector ObjectiveSet::subgradient(int agent, ConstVecRef x) const {
  Vector g(x.size());
  subgradient(agent, x, g);
  return g;
}

Optimum ObjectiveSet::exact_optimum(const BlockSpec&) const {
  throw std::runtime_error("exact_optimum: unsupported for this objective");
}

QuadraticSensorObjective::QuadraticSensorObjective(Vector weights,
                                                   Eigen::MatrixXd anchors)
    : weights_(std::move(weights)), anchors_(std::move(anchors)) {
  if (weights_.size() == 0 || anchors_.rows() != weights_.size())
    throw std::invalid_argument(
        "QuadraticSensorObjective: one weight and one anchor row per agent");
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0 && weights_[i] <= 1.0))
      throw std::invalid_argument(
          "QuadraticSensorObjective: weights must lie in (0,1]");
  }
}

QuadraticSensorObjective QuadraticSensorObjective::generate(
    int num_agents, int dim, rng::Stream stream) {
  if (num_agents < 1 || dim < 1)
    throw std::invalid_argument("generate: need num_agents >= 1 and dim >= 1");
  Vector weights(num_agents);
  Eigen::MatrixXd anchors(num_agents, dim);
  for (int i = 0; i < num_agents; ++i) {
    const rng::Stream agent_stream{
        rng::derive(stream.key, static_cast<std::uint64_t>(i))};
    // 1 - U[0,1) lands in (0,1], matching the weight domain.
    weights[i] = 1.0 - agent_stream.uniform(0);
    for (int j = 0; j < dim; ++j)
      anchors(i, j) = agent_stream.uniform(1 + static_cast<std::uint64_t>(j));
  }
  return QuadraticSensorObjective(std::move(weights), std::move(anchors));
}

QuadraticSensorObjective QuadraticSensorObjective::load(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open objective data file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof())
      throw std::runtime_error("objective data file: non-numeric token");
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw std::runtime_error("objective data file: no data rows");
  const std::size_t width = rows.front().size();
  if (width < 2)
    throw std::runtime_error(
        "objective data file: each row needs a_i plus anchor coordinates");
  Vector weights(static_cast<Eigen::Index>(rows.size()));
  Eigen::MatrixXd anchors(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(width - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width)
      throw std::runtime_error("objective data file: ragged rows");
    weights[static_cast<Eigen::Index>(i)] = rows[i][0];
    for (std::size_t j = 1; j < width; ++j)
      anchors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 1)) =
          rows[i][j];
  }
  return QuadraticSensorObjective(std::move(weights), std::move(anchors));
}

void QuadraticSensorObjective::check_agent(int agent) const {
  if (agent < 0 || agent >= num_agents())
    throw std::invalid_argument("agent index out of range");
}

void QuadraticSensorObjective::check_dim(ConstVecRef x) const {
  if (x.size() != dim())
    throw std::invalid_argument("objective: dimension mismatch");
}

double QuadraticSensorObjective::value(int agent, ConstVecRef x) const {
  check_agent(agent);
  check_dim(x);
  return weights_[agent] * (x.transpose() - anchors_.row(agent)).squaredNorm();
}

void QuadraticSensorObjective::subgradient(int agent, ConstVecRef x,
                                           VecRef out) const {
  check_agent(agent);
  check_dim(x);
  out = 2.0 * weights_[agent] * (x.transpose() - anchors_.row(agent)).transpose();
}

void QuadraticSensorObjective::block_subgradient(int agent, ConstVecRef x,
                                                 int offset, int size,
                                                 VecRef out) const {
  check_agent(agent);
  check_dim(x);
  out = 2.0 * weights_[agent] *
        (x.segment(offset, size).transpose() -
         anchors_.row(agent).segment(offset, size))
            .transpose();
}

double QuadraticSensorObjective::sup_block_subgrad_norm(
    int agent, const BlockSpec& spec, int s) const {
  check_agent(agent);
  if (spec.total_dim() != dim())
    throw std::invalid_argument("sup_block_subgrad_norm: space/objective "
                                "dimension mismatch");
  const int off = spec.offset(s);
  const int n = spec.size(s);
  const auto anchor = anchors_.row(agent).segment(off, n);
  const FeasibleBlock& blk = spec.block(s);
  const double two_a = 2.0 * weights_[agent];

  if (const auto* box = std::get_if<Box>(&blk.set)) {
    double sq = 0.0;
    for (int j = 0; j < n; ++j) {
      const double reach =
          std::max(box->hi[j] - anchor[j], anchor[j] - box->lo[j]);
      sq += reach * reach;
    }
    return two_a * std::sqrt(std::max(sq, 0.0));
  }
  if (const auto* ball = std::get_if<Ball>(&blk.set)) {
    return two_a * (ball->radius + anchor.norm());
  }
  // Simplex: ||x - b|| is convex, so its max over the polytope is attained
  // at a vertex.
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    Vector vertex = Vector::Zero(n);
    vertex[j] = 1.0;
    best = std::max(best, (vertex.transpose() - anchor).norm());
  }
  return two_a * best;
}

Optimum QuadraticSensorObjective::exact_optimum(const BlockSpec& spec) const {
  if (spec.total_dim() != dim())
    throw std::invalid_argument("exact_optimum: space/objective dimension "
                                "mismatch");
  for (int s = 0; s < spec.block_count(); ++s) {
    if (!std::holds_alternative<Box>(spec.block(s).set))
      throw std::runtime_error(
          "exact_optimum: closed form requires box blocks");
  }
  // The objective is separable per coordinate over a box: the unconstrained
  // minimizer is the weighted anchor mean, clipped into the bounds.
  const double weight_sum = weights_.sum();
  Vector mean = (weights_.transpose() * anchors_).transpose() / weight_sum;
  Optimum opt;
  opt.x.resize(dim());
  for (int s = 0; s < spec.block_count(); ++s) {
    const auto& box = std::get<Box>(spec.block(s).set);
    const int off = spec.offset(s);
    const int n = spec.size(s);
    opt.x.segment(off, n) =
        mean.segment(off, n).cwiseMax(box.lo).cwiseMin(box.hi);
  }
  opt.value = global_value(opt.x);
  return opt;
}

void stoch_subgradient_into(const ObjectiveSet& obj, int agent, ConstVecRef x,
                            const NoiseModel& noise, const rng::Stream& stream,
                            VecRef out) {
  obj.subgradient(agent, x, out);
  if (noise.is_none()) return;
  for (Eigen::Index j = 0; j < out.size(); ++j)
    out[j] += noise.sigma * stream.normal(static_cast<std::uint64_t>(j));
}

Vector stoch_subgradient(const ObjectiveSet& obj, int agent, ConstVecRef x,
                         const NoiseModel& noise, const rng::Stream& stream) {
  Vector g(x.size());
  stoch_subgradient_into(obj, agent, x, noise, stream, g);
  return g;
}

void block_stoch_subgradient_into(const ObjectiveSet& obj, int agent,
                                  ConstVecRef x, const BlockSpec& spec, int s,
                                  const NoiseModel& noise,
                                  const rng::Stream& stream, VecRef out) {
  const int off = spec.offset(s);
  const int n = spec.size(s);
  obj.block_subgradient(agent, x, off, n, out);
  if (noise.is_none()) return;
  // Noise indexed by global coordinate: the draw consumes exactly n_s
  // variates and block draws concatenate to the full draw.
  for (int j = 0; j < n; ++j)
    out[j] += noise.sigma * stream.normal(static_cast<std::uint64_t>(off + j));
}

Vector block_stoch_subgradient(const ObjectiveSet& obj, int agent,
                               ConstVecRef x, const BlockSpec& spec, int s,
                               const NoiseModel& noise,
                               const rng::Stream& stream) {
  Vector g(spec.size(s));
  block_stoch_subgradient_into(obj, agent, x, spec, s, noise, stream, g);
  return g;
}

SubgradBounds bounds_from_per_block(Vector per_block) {
  SubgradBounds b;
  b.per_block = std::move(per_block);
  b.m1 = b.per_block.sum();
  b.m2 = b.per_block.norm();
  return b;
}

SubgradBounds analytic_bounds(const ObjectiveSet& obj, const BlockSpec& spec,
                              const NoiseModel& noise) {
  Vector per_block(spec.block_count());
  for (int s = 0; s < spec.block_count(); ++s) {
    double worst_sq = 0.0;
    for (int i = 0; i < obj.num_agents(); ++i) {
      const double g = obj.sup_block_subgrad_norm(i, spec, s);
      worst_sq = std::max(worst_sq, g * g);
    }
    per_block[s] =
        std::sqrt(worst_sq + spec.size(s) * noise.sigma * noise.sigma);
  }
  return bounds_from_per_block(std::move(per_block));
}

SubgradBounds generator_bounds(const BlockSpec& spec,
                               const NoiseModel& noise) {
  Vector per_block(spec.block_count());
  for (int s = 0; s < spec.block_count(); ++s) {
    const FeasibleBlock& blk = spec.block(s);
    const auto* box = std::get_if<Box>(&blk.set);
    if (box == nullptr)
      throw std::runtime_error(
          "generator_bounds: the quadratic-sensor generator is defined over "
          "box blocks");
    double sq = 0.0;
    for (int j = 0; j < blk.dim; ++j) {
      // a <= 1 and the anchor coordinate ranges over [0,1].
      const double reach = std::max(box->hi[j] - 0.0, 1.0 - box->lo[j]);
      sq += reach * reach;
    }
    per_block[s] =
        std::sqrt(4.0 * sq + blk.dim * noise.sigma * noise.sigma);
  }
  return bounds_from_per_block(std::move(per_block));
}

}  // namespace dsbcd
