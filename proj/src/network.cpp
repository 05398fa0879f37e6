#include "dsbcd/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dsbcd/rng.hpp"

namespace dsbcd {

namespace {

constexpr double kStochTol = 1e-12;

bool strongly_connected(const std::vector<std::vector<int>>& fwd,
                        const std::vector<std::vector<int>>& bwd) {
  const int n = static_cast<int>(fwd.size());
  if (n <= 1) return true;
  auto reaches_all = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  return reaches_all(fwd) && reaches_all(bwd);
}

}  // namespace

void NetworkParams::validate() const {
  if (num_agents < 1)
    throw std::invalid_argument("NetworkParams: num_agents must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("NetworkParams: delta must lie in (0,1)");
  if (delta > 1.0 / num_agents + kStochTol)
    throw std::invalid_argument(
        "NetworkParams: delta must not exceed 1/N (entry floor infeasible "
        "for a doubly stochastic matrix)");
  if (period < 1)
    throw std::invalid_argument("NetworkParams: period must be >= 1");
}

ErgodicityConstants ergodicity_constants(const NetworkParams& params) {
  params.validate();
  const double n = static_cast<double>(params.num_agents);
  const double base = 1.0 - params.delta / (4.0 * n * n);
  ErgodicityConstants c;
  c.gamma_big = 1.0 / (base * base);
  c.gamma = std::pow(base, 1.0 / params.period);
  return c;
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "complete_uniform") return ScheduleKind::CompleteUniform;
  if (name == "periodic_ring_parts") return ScheduleKind::PeriodicRingParts;
  if (name == "random_metropolis") return ScheduleKind::RandomMetropolis;
  throw std::invalid_argument("unknown schedule kind: " + name);
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::CompleteUniform:
      return "complete_uniform";
    case ScheduleKind::PeriodicRingParts:
      return "periodic_ring_parts";
    case ScheduleKind::RandomMetropolis:
      return "random_metropolis";
  }
  return "?";
}

MixingSchedule::MixingSchedule(ScheduleKind kind, NetworkParams params,
                               std::uint64_t seed, double extra_edge_prob)
    : kind_(kind),
      params_(params),
      seed_(seed),
      extra_edge_prob_(extra_edge_prob) {
  params_.validate();
  if (extra_edge_prob_ < 0.0 || extra_edge_prob_ > 1.0)
    throw std::invalid_argument(
        "MixingSchedule: extra_edge_prob must lie in [0,1]");
}

void MixingSchedule::ring_edges(long k,
                                std::vector<std::pair<int, int>>& edges) const {
  edges.clear();
  const int n = params_.num_agents;
  if (n < 2) return;
  const int slot = static_cast<int>(k % params_.period);
  for (int e = slot; e < n; e += params_.period)
    edges.emplace_back(e, (e + 1) % n);
}

void MixingSchedule::metropolis_edges(long k,
                                      std::vector<std::pair<int, int>>& edges,
                                      std::vector<double>& weights) const {
  edges.clear();
  weights.clear();
  const int n = params_.num_agents;
  if (n < 2) return;

  rng::SequentialRng r{
      {rng::derive(seed_, rng::purpose::kGraph, static_cast<std::uint64_t>(k))}};

  // Reused scratch; this runs once per round in the engine hot loop.
  static thread_local std::vector<int> order;
  static thread_local std::vector<char> adj;
  static thread_local std::vector<int> degree;
  order.resize(static_cast<std::size_t>(n));
  adj.assign(static_cast<std::size_t>(n) * n, 0);
  degree.assign(static_cast<std::size_t>(n), 0);

  // Random spanning tree over a random vertex order, then independent extra
  // edges. One uniform is consumed per vertex pair so the draw layout does
  // not depend on the tree.
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[r.next_below(static_cast<std::uint64_t>(i + 1))]);

  auto link = [&](int u, int v) {
    adj[static_cast<std::size_t>(u) * n + v] = 1;
    adj[static_cast<std::size_t>(v) * n + u] = 1;
  };
  for (int i = 1; i < n; ++i)
    link(order[static_cast<std::size_t>(i)],
         order[r.next_below(static_cast<std::uint64_t>(i))]);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (r.next_uniform() < extra_edge_prob_) link(i, j);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (adj[static_cast<std::size_t>(i) * n + j]) ++degree[static_cast<std::size_t>(i)];

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!adj[static_cast<std::size_t>(i) * n + j]) continue;
      edges.emplace_back(i, j);
      weights.push_back(
          1.0 / (1.0 + std::max(degree[static_cast<std::size_t>(i)],
                                degree[static_cast<std::size_t>(j)])));
    }
  }
}

Eigen::MatrixXd MixingSchedule::matrix_at(long k) const {
  if (k < 0) throw std::invalid_argument("matrix_at: round index must be >= 0");
  const int n = params_.num_agents;
  switch (kind_) {
    case ScheduleKind::CompleteUniform:
      return Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    case ScheduleKind::PeriodicRingParts: {
      Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
      std::vector<std::pair<int, int>> edges;
      ring_edges(k, edges);
      for (const auto& [u, v] : edges) {
        // Left-multiplication by the pairwise averaging matrix of (u, v).
        p.row(u) = 0.5 * (p.row(u) + p.row(v)).eval();
        p.row(v) = p.row(u);
      }
      return p;
    }
    case ScheduleKind::RandomMetropolis: {
      Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
      std::vector<std::pair<int, int>> edges;
      std::vector<double> weights;
      metropolis_edges(k, edges, weights);
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        const double w = weights[e];
        p(u, v) += w;
        p(v, u) += w;
        p(u, u) -= w;
        p(v, v) -= w;
      }
      return p;
    }
  }
  throw std::logic_error("matrix_at: unreachable");
}

void MixingSchedule::apply(long k, const RowMatrix& x, RowMatrix& y) const {
  const int n = params_.num_agents;
  if (x.rows() != n)
    throw std::invalid_argument("apply: state row count != num_agents");
  switch (kind_) {
    case ScheduleKind::CompleteUniform: {
      y.resize(x.rows(), x.cols());
      Eigen::RowVectorXd mean = x.colwise().mean();
      y.rowwise() = mean;
      return;
    }
    case ScheduleKind::PeriodicRingParts: {
      y = x;
      static thread_local std::vector<std::pair<int, int>> edges;
      ring_edges(k, edges);
      for (const auto& [u, v] : edges) {
        y.row(u) = 0.5 * (y.row(u) + y.row(v)).eval();
        y.row(v) = y.row(u);
      }
      return;
    }
    case ScheduleKind::RandomMetropolis: {
      y = x;
      static thread_local std::vector<std::pair<int, int>> edges;
      static thread_local std::vector<double> weights;
      metropolis_edges(k, edges, weights);
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        const double w = weights[e];
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
          const double diff = w * (x(v, c) - x(u, c));
          y(u, c) += diff;
          y(v, c) -= diff;
        }
      }
      return;
    }
  }
}

double MixingSchedule::implied_delta() const {
  const int n = params_.num_agents;
  if (n == 1) return 0.5;  // arbitrary valid floor; P = [1]
  switch (kind_) {
    case ScheduleKind::CompleteUniform:
    case ScheduleKind::RandomMetropolis:
      // Metropolis weights: w = 1/(1+max deg) >= 1/N and the diagonal
      // residual is >= 1/(1+deg) >= 1/N on a connected graph.
      return 1.0 / n;
    case ScheduleKind::PeriodicRingParts: {
      double floor = 1.0 / n;
      for (int k = 0; k < params_.period; ++k) {
        const Eigen::MatrixXd p = matrix_at(k);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (p(i, j) > kStochTol) floor = std::min(floor, p(i, j));
      }
      return floor;
    }
  }
  return 1.0 / n;
}

ValidationReport validate_schedule(const MatrixSource& source,
                                   const NetworkParams& params, long horizon) {
  params.validate();
  if (horizon < params.period)
    throw std::invalid_argument("validate_schedule: horizon must be >= period");
  const int n = params.num_agents;
  const double delta = params.delta;

  auto fail = [](long round, std::string msg) {
    return ValidationReport{false, round, std::move(msg)};
  };

  std::vector<Eigen::MatrixXd> window;
  window.reserve(static_cast<std::size_t>(params.period));

  for (long k = 0; k < horizon; ++k) {
    Eigen::MatrixXd p = source(k);
    if (p.rows() != n || p.cols() != n)
      return fail(k, "matrix dimension mismatch at round " + std::to_string(k));
    for (int i = 0; i < n; ++i) {
      if (p.row(i).minCoeff() < -kStochTol)
        return fail(k, "negative entry at round " + std::to_string(k));
      if (std::abs(p.row(i).sum() - 1.0) > kStochTol)
        return fail(k, "row sum violates double stochasticity at round " +
                           std::to_string(k) + " (row " + std::to_string(i) +
                           " sum=" + std::to_string(p.row(i).sum()) + ")");
      if (std::abs(p.col(i).sum() - 1.0) > kStochTol)
        return fail(k, "column sum violates double stochasticity at round " +
                           std::to_string(k) + " (column " + std::to_string(i) +
                           " sum=" + std::to_string(p.col(i).sum()) + ")");
      if (p(i, i) < delta - kStochTol)
        return fail(k, "diagonal entry below delta at round " +
                           std::to_string(k) + " (agent " + std::to_string(i) +
                           ")");
    }

    // Sliding window union connectivity check.
    window.push_back(std::move(p));
    if (static_cast<long>(window.size()) > params.period)
      window.erase(window.begin());
    if (static_cast<long>(window.size()) == params.period) {
      std::vector<std::vector<int>> fwd(n), bwd(n);
      for (const Eigen::MatrixXd& q : window) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            if (i != j && q(i, j) >= delta - kStochTol) {
              // edge (j, i): information flows from j into i
              fwd[j].push_back(i);
              bwd[i].push_back(j);
            }
          }
        }
      }
      if (!strongly_connected(fwd, bwd)) {
        const long start = k - params.period + 1;
        return fail(start, "union graph over window [" + std::to_string(start) +
                               ", " + std::to_string(k) +
                               "] is not strongly connected");
      }
    }
  }
  return ValidationReport{};
}

ValidationReport validate_schedule(const MixingSchedule& schedule,
                                   long horizon) {
  return validate_schedule([&](long k) { return schedule.matrix_at(k); },
                           schedule.params(), horizon);
}

Eigen::MatrixXd transition_product(const MatrixSource& source, long t,
                                   long s) {
  if (t < s || s < 0)
    throw std::invalid_argument("transition_product: need t >= s >= 0");
  Eigen::MatrixXd prod = source(s);
  for (long k = s + 1; k <= t; ++k) prod = source(k) * prod;
  return prod;
}

Eigen::MatrixXd transition_product(const MixingSchedule& schedule, long t,
                                   long s) {
  return transition_product([&](long k) { return schedule.matrix_at(k); }, t,
                            s);
}

Lemma2Report check_lemma2(const MatrixSource& source,
                          const NetworkParams& params, long horizon) {
  params.validate();
  const int n = params.num_agents;
  const ErgodicityConstants c = ergodicity_constants(params);
  constexpr double tol = 1e-9;

  Lemma2Report report;
  report.max_excess = -std::numeric_limits<double>::infinity();
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(static_cast<std::size_t>(horizon) + 1);
  for (long k = 0; k <= horizon; ++k) mats.push_back(source(k));

  for (long s = 0; s <= horizon; ++s) {
    Eigen::MatrixXd prod = mats[static_cast<std::size_t>(s)];
    double geom = c.gamma_big;  // Gamma * gamma^(t-s) at t == s
    for (long t = s;; ++t) {
      const double deviation = (prod.array() - 1.0 / n).abs().maxCoeff();
      const double excess = deviation - (geom + tol);
      ++report.pairs_checked;
      if (excess > report.max_excess) {
        report.max_excess = excess;
        report.worst_t = t;
        report.worst_s = s;
      }
      report.max_ratio = std::max(report.max_ratio, deviation / geom);
      if (excess > 0.0) report.holds = false;
      if (t == horizon) break;
      prod = mats[static_cast<std::size_t>(t + 1)] * prod;
      geom *= c.gamma;
    }
  }
  return report;
}

Lemma2Report check_lemma2(const MixingSchedule& schedule, long horizon) {
  return check_lemma2([&](long k) { return schedule.matrix_at(k); },
                      schedule.params(), horizon);
}

}  // namespace dsbcd
