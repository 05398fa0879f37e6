#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

// Time-varying communication graphs G_k = (V, E_k, P_k): doubly stochastic
// matrix sequences, transition products P(t,s) = P_t ... P_s and the
// ergodicity constants Gamma, gamma they contract with.

namespace dsbcd {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct NetworkParams {
  int num_agents = 1;   // N
  double delta = 0.5;   // entry floor, 0 < delta < 1 and delta <= 1/N
  int period = 1;       // B: connectivity window

  void validate() const;
};

struct ErgodicityConstants {
  double gamma_big = 1.0;  // Gamma = (1 - delta/(4N^2))^{-2}
  double gamma = 0.0;      // gamma = (1 - delta/(4N^2))^{1/B}
};

ErgodicityConstants ergodicity_constants(const NetworkParams& params);

enum class ScheduleKind { CompleteUniform, PeriodicRingParts, RandomMetropolis };

ScheduleKind schedule_kind_from_string(const std::string& name);
std::string to_string(ScheduleKind kind);

// Deterministic source of mixing matrices: matrix_at(k) is a pure function
// of (kind, params, seed, k). Immutable after construction and shareable
// across workers.
class MixingSchedule {
 public:
  MixingSchedule(ScheduleKind kind, NetworkParams params, std::uint64_t seed,
                 double extra_edge_prob = 0.3);

  ScheduleKind kind() const { return kind_; }
  const NetworkParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

  Eigen::MatrixXd matrix_at(long k) const;

  // y = P_k x for row-per-agent state matrices; sparse kinds avoid the
  // dense product.
  void apply(long k, const RowMatrix& x, RowMatrix& y) const;

  // The largest entry floor the generator actually guarantees; used as the
  // default delta when a config leaves it unspecified.
  double implied_delta() const;

 private:
  // Undirected weighted edges describing P_k = I - sum_e w_e (e_u-e_v)(e_u-e_v)^T
  // for the Metropolis kind.
  void metropolis_edges(long k, std::vector<std::pair<int, int>>& edges,
                        std::vector<double>& weights) const;
  // Ring edges assigned to slot k mod B (pairwise averaging, applied in
  // ascending edge order).
  void ring_edges(long k, std::vector<std::pair<int, int>>& edges) const;

  ScheduleKind kind_;
  NetworkParams params_;
  std::uint64_t seed_;
  double extra_edge_prob_;
};

// Matrix sources for validation/checking utilities; wraps either a
// MixingSchedule or an arbitrary generator (negative controls in tests).
using MatrixSource = std::function<Eigen::MatrixXd(long)>;

struct ValidationReport {
  bool valid = true;
  long round = -1;  // first offending round or window start
  std::string message = "valid";
};

// Checks every matrix over rounds [0, horizon) for double stochasticity
// (tolerance 1e-12), nonnegativity and the diagonal/entry floor delta, and
// every window [k, k+B) for strong connectivity of the union edge set
// {(j,i): [P]_ij >= delta}.
ValidationReport validate_schedule(const MatrixSource& source,
                                   const NetworkParams& params, long horizon);
ValidationReport validate_schedule(const MixingSchedule& schedule,
                                   long horizon);

// P(t,s) = P_t P_{t-1} ... P_s, t >= s >= 0.
Eigen::MatrixXd transition_product(const MatrixSource& source, long t, long s);
Eigen::MatrixXd transition_product(const MixingSchedule& schedule, long t,
                                   long s);

struct Lemma2Report {
  bool holds = true;
  // max over (t,s,i,j) of deviation - (Gamma gamma^{t-s} + tol); <= 0 iff ok
  double max_excess = 0.0;
  // max over (t,s) of deviation / (Gamma gamma^{t-s}); diagnostic slack
  double max_ratio = 0.0;
  long worst_t = 0;
  long worst_s = 0;
  long pairs_checked = 0;
};

// Asserts |[P(t,s)]_ij - 1/N| <= Gamma gamma^{t-s} + 1e-9 over all
// 0 <= s <= t <= horizon.
Lemma2Report check_lemma2(const MatrixSource& source,
                          const NetworkParams& params, long horizon);
Lemma2Report check_lemma2(const MixingSchedule& schedule, long horizon);

}  // namespace dsbcd
