#pragma once

#include <Eigen/Core>
#include <variant>
#include <vector>

// Block-structured decision space X = X_1 x ... x X_b with per-block
// distance-generating functions, Bregman divergences and the block Bregman
// projection operator. Only closed-form projections are shipped:
// box/euclidean, ball/euclidean, simplex/euclidean, simplex/entropy.

namespace dsbcd {

using Vector = Eigen::VectorXd;
using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;
using VecRef = Eigen::Ref<Eigen::VectorXd>;

// Relative feasibility tolerance applied to all preconditions.
inline constexpr double kFeasTol = 1e-9;
// Interiority floor for entropy/simplex blocks: projection outputs are
// floored at this value and renormalized so the dgf gradient stays finite.
inline constexpr double kEntropyFloor = 1e-12;

struct Box {
  Vector lo;
  Vector hi;
};
struct Simplex {};
struct Ball {
  double radius = 1.0;
};

using BlockSet = std::variant<Box, Simplex, Ball>;

enum class Dgf { Euclidean, Entropy };

struct FeasibleBlock {
  int dim = 0;
  BlockSet set;
  Dgf dgf = Dgf::Euclidean;
};

struct BlockDiameter {
  Vector d_squared;  // one entry per block
  double total() const { return d_squared.sum(); }
};

class BlockSpec {
 public:
  explicit BlockSpec(std::vector<FeasibleBlock> blocks);

  int block_count() const { return static_cast<int>(blocks_.size()); }
  int total_dim() const { return total_dim_; }
  int size(int s) const { return blocks_[check_block(s)].dim; }
  int offset(int s) const { return offsets_[check_block(s)]; }
  const FeasibleBlock& block(int s) const { return blocks_[check_block(s)]; }

  bool is_feasible(int s, ConstVecRef y, double tol = kFeasTol) const;
  bool is_feasible_full(ConstVecRef x, double tol = kFeasTol) const;

  // D_s(x, y) = Phi_s(x) - Phi_s(y) - <grad Phi_s(y), x - y>.
  double bregman_div(int s, ConstVecRef x, ConstVecRef y) const;

  // Gradient of the distance-generating function of block s at y.
  Vector grad_dgf(int s, ConstVecRef y) const;

  // argmin_{y in X_s} { <g, y> + D_s(y, x) / alpha }.
  Vector block_project(int s, ConstVecRef x, ConstVecRef g,
                       double alpha) const;
  void block_project_into(int s, ConstVecRef x, ConstVecRef g, double alpha,
                          VecRef out) const;

  // Independent application of block_project on every block; the product
  // structure makes the joint problem separable.
  Vector full_project(ConstVecRef x, ConstVecRef g, double alpha) const;

  // Analytic upper bounds d_s^2 on D_s over X_s x X_s.
  BlockDiameter diameter_bound() const;

 private:
  int check_block(int s) const;

  std::vector<FeasibleBlock> blocks_;
  std::vector<int> offsets_;
  int total_dim_ = 0;
};

// Convenience constructors used by the config parser, tests and bindings.
FeasibleBlock box_block(int dim, double lo, double hi,
                        Dgf dgf = Dgf::Euclidean);
FeasibleBlock box_block(Vector lo, Vector hi, Dgf dgf = Dgf::Euclidean);
FeasibleBlock ball_block(int dim, double radius);
FeasibleBlock simplex_block(int dim, Dgf dgf = Dgf::Entropy);

}  // namespace dsbcd
