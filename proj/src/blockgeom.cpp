#include "dsbcd/blockgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dsbcd {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double entropy_value(ConstVecRef y) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (y[j] > 0.0) v += y[j] * std::log(y[j]);
    // y ln y -> 0 as y -> 0.
  }
  return v;
}

// Euclidean projection onto the unit simplex (sort-based pivot search).
void project_simplex_euclidean(const Vector& v, VecRef out) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0.0;
  double lambda = 0.0;
  int support = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    running += u[j];
    const double candidate = (1.0 - running) / static_cast<double>(j + 1);
    if (u[j] + candidate > 0.0) {
      lambda = candidate;
      support = static_cast<int>(j + 1);
    }
  }
  (void)support;
  for (Eigen::Index j = 0; j < n; ++j) out[j] = std::max(v[j] + lambda, 0.0);
}

}  // namespace

BlockSpec::BlockSpec(std::vector<FeasibleBlock> blocks)
    : blocks_(std::move(blocks)) {
  require(!blocks_.empty(), "BlockSpec: need at least one block");
  offsets_.reserve(blocks_.size());
  for (std::size_t s = 0; s < blocks_.size(); ++s) {
    const FeasibleBlock& blk = blocks_[s];
    require(blk.dim >= 1, "BlockSpec: block dimensions must be >= 1");
    if (const auto* box = std::get_if<Box>(&blk.set)) {
      require(box->lo.size() == blk.dim && box->hi.size() == blk.dim,
              "BlockSpec: box bound size mismatch");
      require((box->lo.array() <= box->hi.array()).all(),
              "BlockSpec: box requires lo <= hi componentwise");
      require(blk.dgf == Dgf::Euclidean,
              "BlockSpec: entropy dgf is only valid on a simplex");
    } else if (const auto* ball = std::get_if<Ball>(&blk.set)) {
      require(ball->radius > 0.0, "BlockSpec: ball radius must be positive");
      require(blk.dgf == Dgf::Euclidean,
              "BlockSpec: entropy dgf is only valid on a simplex");
    }
    offsets_.push_back(total_dim_);
    total_dim_ += blk.dim;
  }
}

int BlockSpec::check_block(int s) const {
  if (s < 0 || s >= static_cast<int>(blocks_.size()))
    throw std::invalid_argument("BlockSpec: block index out of range");
  return s;
}

bool BlockSpec::is_feasible(int s, ConstVecRef y, double tol) const {
  const FeasibleBlock& blk = block(s);
  if (y.size() != blk.dim) return false;
  if (const auto* box = std::get_if<Box>(&blk.set)) {
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      const double scale =
          std::max({1.0, std::abs(box->lo[j]), std::abs(box->hi[j])});
      if (y[j] < box->lo[j] - tol * scale || y[j] > box->hi[j] + tol * scale)
        return false;
    }
    return true;
  }
  if (const auto* ball = std::get_if<Ball>(&blk.set)) {
    return y.norm() <= ball->radius * (1.0 + tol);
  }
  // Simplex.
  if ((y.array() < -tol).any()) return false;
  return std::abs(y.sum() - 1.0) <= tol * static_cast<double>(y.size());
}

bool BlockSpec::is_feasible_full(ConstVecRef x, double tol) const {
  if (x.size() != total_dim_) return false;
  for (int s = 0; s < block_count(); ++s) {
    if (!is_feasible(s, x.segment(offsets_[s], blocks_[s].dim), tol))
      return false;
  }
  return true;
}

double BlockSpec::bregman_div(int s, ConstVecRef x, ConstVecRef y) const {
  const FeasibleBlock& blk = block(s);
  require(x.size() == blk.dim && y.size() == blk.dim,
          "bregman_div: dimension mismatch");
  if (!is_feasible(s, x) || !is_feasible(s, y))
    throw std::domain_error("bregman_div: infeasible input point");
  if (blk.dgf == Dgf::Euclidean) {
    return 0.5 * (x - y).squaredNorm();
  }
  const Vector grad = grad_dgf(s, y);  // throws on nonpositive y
  const double d = entropy_value(x) - entropy_value(y) - grad.dot(x - y);
  return std::max(d, 0.0);
}

Vector BlockSpec::grad_dgf(int s, ConstVecRef y) const {
  const FeasibleBlock& blk = block(s);
  require(y.size() == blk.dim, "grad_dgf: dimension mismatch");
  if (blk.dgf == Dgf::Euclidean) return y;
  Vector g(y.size());
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (y[j] <= 0.0)
      throw std::domain_error(
          "grad_dgf: entropy gradient undefined at a nonpositive coordinate");
    g[j] = 1.0 + std::log(y[j]);
  }
  return g;
}

void BlockSpec::block_project_into(int s, ConstVecRef x, ConstVecRef g,
                                   double alpha, VecRef out) const {
  const FeasibleBlock& blk = block(s);
  require(x.size() == blk.dim && g.size() == blk.dim && out.size() == blk.dim,
          "block_project: dimension mismatch");
  require(alpha > 0.0, "block_project: alpha must be positive");
  if (!is_feasible(s, x))
    throw std::domain_error("block_project: infeasible base point");

  if (const auto* box = std::get_if<Box>(&blk.set)) {
    out = (x - alpha * g).cwiseMax(box->lo).cwiseMin(box->hi);
    return;
  }
  if (const auto* ball = std::get_if<Ball>(&blk.set)) {
    out = x - alpha * g;
    const double norm = out.norm();
    if (norm > ball->radius) out *= ball->radius / norm;
    return;
  }
  // Simplex.
  if (blk.dgf == Dgf::Euclidean) {
    project_simplex_euclidean(x - alpha * g, out);
    return;
  }
  // Entropy: multiplicative weights, y_j proportional to x_j exp(-alpha g_j),
  // computed in log space for stability. The interiority floor keeps the
  // next gradient evaluation finite.
  const Eigen::Index n = x.size();
  double peak = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lx = std::log(std::max(x[j], kEntropyFloor));
    out[j] = lx - alpha * g[j];
    peak = std::max(peak, out[j]);
  }
  double z = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    out[j] = std::exp(out[j] - peak);
    z += out[j];
  }
  out /= z;
  out = out.cwiseMax(kEntropyFloor);
  out /= out.sum();
}

Vector BlockSpec::block_project(int s, ConstVecRef x, ConstVecRef g,
                                double alpha) const {
  Vector out(block(s).dim);
  block_project_into(s, x, g, alpha, out);
  return out;
}

Vector BlockSpec::full_project(ConstVecRef x, ConstVecRef g,
                               double alpha) const {
  require(x.size() == total_dim_ && g.size() == total_dim_,
          "full_project: dimension mismatch");
  Vector out(total_dim_);
  for (int s = 0; s < block_count(); ++s) {
    const int off = offsets_[s];
    const int n = blocks_[s].dim;
    block_project_into(s, x.segment(off, n), g.segment(off, n), alpha,
                       out.segment(off, n));
  }
  return out;
}

BlockDiameter BlockSpec::diameter_bound() const {
  BlockDiameter d;
  d.d_squared.resize(block_count());
  for (int s = 0; s < block_count(); ++s) {
    const FeasibleBlock& blk = blocks_[s];
    if (const auto* box = std::get_if<Box>(&blk.set)) {
      d.d_squared[s] = 0.5 * (box->hi - box->lo).squaredNorm();
    } else if (const auto* ball = std::get_if<Ball>(&blk.set)) {
      d.d_squared[s] = 2.0 * ball->radius * ball->radius;  // (2r)^2 / 2
    } else if (blk.dgf == Dgf::Euclidean) {
      // Max ||x - y||^2 over the simplex is 2 (between two vertices).
      d.d_squared[s] = blk.dim >= 2 ? 1.0 : 0.0;
    } else {
      // KL is unbounded at the boundary; under the interiority floor the
      // second argument stays >= kEntropyFloor, so KL <= ln(1/floor).
      d.d_squared[s] = std::log(1.0 / kEntropyFloor);
    }
  }
  return d;
}

FeasibleBlock box_block(int dim, double lo, double hi, Dgf dgf) {
  FeasibleBlock b;
  b.dim = dim;
  b.set = Box{Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
  b.dgf = dgf;
  return b;
}

FeasibleBlock box_block(Vector lo, Vector hi, Dgf dgf) {
  FeasibleBlock b;
  b.dim = static_cast<int>(lo.size());
  b.set = Box{std::move(lo), std::move(hi)};
  b.dgf = dgf;
  return b;
}

FeasibleBlock ball_block(int dim, double radius) {
  FeasibleBlock b;
  b.dim = dim;
  b.set = Ball{radius};
  return b;
}

FeasibleBlock simplex_block(int dim, Dgf dgf) {
  FeasibleBlock b;
  b.dim = dim;
  b.set = Simplex{};
  b.dgf = dgf;
  return b;
}

}  // namespace dsbcd
