#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>

#include "dsbcd/blockgeom.hpp"
#include "dsbcd/rng.hpp"

// Per-agent objectives f_i with exact subgradients, unbiased stochastic
// estimators G_i(x, xi) and the analytic Assumption-style norm bounds the
// convergence constants are built from.

namespace dsbcd {

struct NoiseModel {
  double sigma = 0.0;  // per-coordinate additive Gaussian std dev; 0 = none

  static NoiseModel none() { return {0.0}; }
  static NoiseModel gaussian(double sigma);
  bool is_none() const { return sigma == 0.0; }
};

struct Optimum {
  Vector x;
  double value = 0.0;
};

// Generic objective-set interface: one convex f_i per agent over a common
// decision space. Implementations must be immutable after construction.
class ObjectiveSet {
 public:
  virtual ~ObjectiveSet() = default;

  virtual int num_agents() const = 0;
  virtual int dim() const = 0;

  virtual double value(int agent, ConstVecRef x) const = 0;
  virtual void subgradient(int agent, ConstVecRef x, VecRef out) const = 0;

  // Slice [offset, offset+size) of a subgradient; overridable so the cost
  // scales with the block size.
  virtual void block_subgradient(int agent, ConstVecRef x, int offset,
                                 int size, VecRef out) const;

  // sup over the feasible set of the block-s subgradient norm; required by
  // analytic_bounds. Throws when no closed form is available.
  virtual double sup_block_subgrad_norm(int agent, const BlockSpec& spec,
                                        int s) const = 0;

  // Exact minimizer over the feasible set, when one is available in closed
  // form; throws otherwise.
  virtual Optimum exact_optimum(const BlockSpec& spec) const;

  double global_value(ConstVecRef x) const;
  Vector subgradient(int agent, ConstVecRef x) const;
};

// f_i(x) = a_i ||x - b_i||^2 with a_i in (0,1], b_i in [0,1]^n.
class QuadraticSensorObjective final : public ObjectiveSet {
 public:
  QuadraticSensorObjective(Vector weights, Eigen::MatrixXd anchors);

  // a_i uniform on (0,1], b_i uniform on [0,1)^n.
  static QuadraticSensorObjective generate(int num_agents, int dim,
                                           rng::Stream stream);
  // Plain-text numeric matrix, one agent per row: a_i then the n anchor
  // coordinates.
  static QuadraticSensorObjective load(const std::string& path);

  int num_agents() const override { return static_cast<int>(weights_.size()); }
  int dim() const override { return static_cast<int>(anchors_.cols()); }
  const Vector& weights() const { return weights_; }
  const Eigen::MatrixXd& anchors() const { return anchors_; }

  using ObjectiveSet::subgradient;
  double value(int agent, ConstVecRef x) const override;
  void subgradient(int agent, ConstVecRef x, VecRef out) const override;
  void block_subgradient(int agent, ConstVecRef x, int offset, int size,
                         VecRef out) const override;
  double sup_block_subgrad_norm(int agent, const BlockSpec& spec,
                                int s) const override;
  Optimum exact_optimum(const BlockSpec& spec) const override;

 private:
  void check_agent(int agent) const;
  void check_dim(ConstVecRef x) const;

  Vector weights_;
  Eigen::MatrixXd anchors_;  // one row per agent
};

// G_i(x, xi) = g_i(x) + eta with eta ~ N(0, sigma^2 I), drawn one normal
// per global coordinate from the given stream. Slicing a block therefore
// consumes exactly the block's coordinates and concatenating block draws
// reproduces the full draw bit-exactly.
Vector stoch_subgradient(const ObjectiveSet& obj, int agent, ConstVecRef x,
                         const NoiseModel& noise, const rng::Stream& stream);
void stoch_subgradient_into(const ObjectiveSet& obj, int agent, ConstVecRef x,
                            const NoiseModel& noise, const rng::Stream& stream,
                            VecRef out);

Vector block_stoch_subgradient(const ObjectiveSet& obj, int agent,
                               ConstVecRef x, const BlockSpec& spec, int s,
                               const NoiseModel& noise,
                               const rng::Stream& stream);
void block_stoch_subgradient_into(const ObjectiveSet& obj, int agent,
                                  ConstVecRef x, const BlockSpec& spec, int s,
                                  const NoiseModel& noise,
                                  const rng::Stream& stream, VecRef out);

struct SubgradBounds {
  Vector per_block;  // M_bar_s, s = 1..b
  double m1 = 0.0;   // sum_s M_bar_s
  double m2 = 0.0;   // (sum_s M_bar_s^2)^{1/2}
};

SubgradBounds bounds_from_per_block(Vector per_block);

// Worst-case M_{i,s}^2 = sup_{x in X} ||g_i^{(s)}(x)||^2 + n_s sigma^2,
// maximized over agents.
SubgradBounds analytic_bounds(const ObjectiveSet& obj, const BlockSpec& spec,
                              const NoiseModel& noise);

// Same bound maximized over every objective the quadratic-sensor generator
// can emit (a_i in (0,1], b_i in [0,1]^n); dominates analytic_bounds of any
// generated instance, as needed when data are regenerated per trial.
SubgradBounds generator_bounds(const BlockSpec& spec, const NoiseModel& noise);

}  // namespace dsbcd
