#include "dsbcd/bounds.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "dsbcd/engine.hpp"

namespace dsbcd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double weighted_m(const BoundInputs& in) {  // sum_s p_s Mbar_s
  return in.probabilities.dot(in.m_bar);
}

void require_uniform_probs(const BoundInputs& in) {
  const double uniform = 1.0 / in.num_blocks;
  if ((in.probabilities.array() - uniform).abs().maxCoeff() > 1e-9)
    throw std::invalid_argument(
        "rate constant requires uniform block probabilities");
}
}  // namespace

void BoundInputs::validate() const {
  require(num_agents >= 1, "BoundInputs: num_agents must be >= 1");
  require(num_blocks >= 1, "BoundInputs: num_blocks must be >= 1");
  require(gamma_big > 1.0 - 1e-15, "BoundInputs: Gamma must exceed 1");
  require(gamma > 0.0 && gamma < 1.0, "BoundInputs: gamma must lie in (0,1)");
  require(m_bar.size() == num_blocks && d_squared.size() == num_blocks &&
              probabilities.size() == num_blocks,
          "BoundInputs: per-block vectors must have num_blocks entries");
  require((m_bar.array() >= 0.0).all(), "BoundInputs: Mbar_s must be >= 0");
  require((d_squared.array() >= 0.0).all(),
          "BoundInputs: d_s^2 must be >= 0");
  require((probabilities.array() >= 0.0).all() &&
              std::abs(probabilities.sum() - 1.0) <= 1e-12,
          "BoundInputs: probabilities must lie on the simplex");
  require(theta > 0.0, "BoundInputs: theta must be > 0");
}

BoundInputs assemble_bound_inputs(const NetworkParams& params,
                                  const SubgradBounds& subgrad,
                                  const BlockDiameter& diameter,
                                  const Vector& probabilities, double theta) {
  const ErgodicityConstants erg = ergodicity_constants(params);
  BoundInputs in;
  in.num_agents = params.num_agents;
  in.num_blocks = static_cast<int>(subgrad.per_block.size());
  in.gamma_big = erg.gamma_big;
  in.gamma = erg.gamma;
  in.m_bar = subgrad.per_block;
  in.m1 = subgrad.m1;
  in.m2 = subgrad.m2;
  in.d_squared = diameter.d_squared;
  in.d_m_squared = diameter.total();
  in.probabilities = probabilities;
  in.theta = theta;
  in.validate();
  return in;
}

double stepsize_sum(double theta, long t) {
  double sum = 0.0;
  for (long k = 0; k <= t; ++k) sum += stepsize(theta, k);
  return sum;
}

Thm1Bound error_bound_thm1(const BoundInputs& in, long t) {
  return error_bound_thm1(in, t,
                          [&](long k) { return stepsize(in.theta, k); });
}

Thm1Bound error_bound_thm1(const BoundInputs& in, long t,
                           const StepSchedule& alpha) {
  in.validate();
  require(t >= 1, "error_bound_thm1: T must be >= 1");
  const double n = in.num_agents;
  const double mix = 4.0 * n * n * in.gamma_big / (1.0 - in.gamma) + 8.0 * n;
  const double m_bar_sq_sum = in.m_bar.squaredNorm();

  double alpha_sum = 0.0;
  for (long k = 0; k <= t; ++k) alpha_sum += alpha(k);

  Thm1Bound bound;
  bound.e1 = (mix * in.m2 * weighted_m(in) + 0.5 * n * m_bar_sq_sum) *
             alpha_sum / static_cast<double>(t);

  double structure = 0.0;
  for (int s = 0; s < in.num_blocks; ++s) {
    const double d_sq = in.d_squared[s];
    const double p = in.probabilities[s];
    if (d_sq == 0.0) continue;
    if (p == 0.0) {
      structure = kInf;
      break;
    }
    structure += n * d_sq / p;
  }
  bound.e2 = structure / (static_cast<double>(t) * alpha(t));
  return bound;
}

double rate_constant_c(const BoundInputs& in) {
  in.validate();
  require_uniform_probs(in);
  const double n = in.num_agents;
  const double b = in.num_blocks;
  const double mix = 8.0 * n * n * in.gamma_big / (1.0 - in.gamma) + 16.0 * n;
  const double root2 = std::sqrt(2.0);
  return (mix / b * in.m1 * in.m2 * root2 + n * in.m2 * in.m2 * root2) *
             in.theta +
         root2 * b * b * n * in.d_m_squared / in.theta;
}

double min_rate_constant(const BoundInputs& in) {
  in.validate();
  const double n = in.num_agents;
  const double b = in.num_blocks;
  const double mix = 16.0 * n * n * n * in.gamma_big / (1.0 - in.gamma) +
                     32.0 * n * n;
  return 2.0 * std::sqrt(mix * in.m1 * in.m2 * in.d_m_squared * b +
                         2.0 * n * n * in.m2 * in.m2 * in.d_m_squared * b * b);
}

double optimal_theta(const BoundInputs& in) {
  in.validate();
  const double n = in.num_agents;
  const double b = in.num_blocks;
  const double denom =
      (8.0 * in.gamma_big * n / (1.0 - in.gamma) + 16.0) * in.m1 * in.m2 +
      in.m2 * in.m2 * b;
  require(denom > 0.0, "optimal_theta: subgradient bounds must be positive");
  // C(theta) has the shape E theta + F/theta; its minimizer is
  // sqrt(F/E) = sqrt(d_M^2 b^3 / denom).
  return std::sqrt(in.d_m_squared * b * b * b / denom);
}

Complexity complexity_t(const BoundInputs& in, double eps) {
  in.validate();
  require(eps > 0.0, "complexity_t: eps must be > 0");
  const double mix = 16.0 * in.gamma_big / (1.0 - in.gamma) + 32.0;
  Complexity result;
  result.kappa = std::max(mix * in.m1 * in.m2 * in.d_m_squared,
                          2.0 * in.m2 * in.m2 * in.d_m_squared);
  const double n = in.num_agents;
  const double b = in.num_blocks;
  result.t_exact = 8.0 * result.kappa * n * n * n * b * b / (eps * eps);
  result.rounds = static_cast<std::uint64_t>(std::ceil(result.t_exact));
  return result;
}

double proj_error_bound_lemma3(const BoundInputs& in, long k) {
  in.validate();
  return weighted_m(in) * stepsize(in.theta, k);
}

double consensus_bound_lemma4(const BoundInputs& in, long t) {
  return consensus_bound_lemma4(
      in, t, [&](long k) { return stepsize(in.theta, k); });
}

double consensus_bound_lemma4(const BoundInputs& in, long t,
                              const StepSchedule& alpha) {
  in.validate();
  const double n = in.num_agents;
  double alpha_sum = 0.0;
  for (long k = 0; k <= t; ++k) alpha_sum += alpha(k);
  return (2.0 * n * n * in.gamma_big / (1.0 - in.gamma) + 4.0 * n) *
         weighted_m(in) * alpha_sum;
}

ComplianceReport check_run_against_bounds(const RunAggregates& aggregates,
                                          const BoundInputs& in) {
  in.validate();
  require(aggregates.num_runs >= 1, "check_run_against_bounds: no runs");
  constexpr double kSlack = 1.05;  // Monte Carlo rows only

  ComplianceReport report;
  auto push = [&report](std::string name, double measured, double bound,
                        bool ok) {
    ComplianceRow row;
    row.name = std::move(name);
    row.measured = measured;
    row.bound = bound;
    row.margin = measured > 0.0 ? bound / measured : kInf;
    row.ok = ok;
    report.rows.push_back(std::move(row));
    report.all_ok = report.all_ok && report.rows.back().ok;
  };

  const Thm1Bound thm1 = error_bound_thm1(in, aggregates.rounds);
  for (Eigen::Index h = 0; h < aggregates.mean_final_error.size(); ++h) {
    const double measured = aggregates.mean_final_error[h];
    push("thm1_agent_" + std::to_string(h), measured, thm1.total(),
         measured <= thm1.total() * kSlack);
  }

  double worst_ratio = 0.0;
  long worst_round = 0;
  for (long k = 0; k < aggregates.rounds; ++k) {
    const double bound = proj_error_bound_lemma3(in, k);
    const double measured = aggregates.mean_proj_err_by_round[k];
    const double ratio = bound > 0.0 ? measured / bound : kInf;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_round = k;
    }
  }
  push("lemma3_round_" + std::to_string(worst_round),
       aggregates.mean_proj_err_by_round[worst_round],
       proj_error_bound_lemma3(in, worst_round), worst_ratio <= kSlack);

  const double lemma4 = consensus_bound_lemma4(in, aggregates.rounds);
  push("lemma4", aggregates.consensus_double_sum, lemma4,
       aggregates.consensus_double_sum <= lemma4 * kSlack);

  // Pathwise inequality: deterministic, no statistical slack.
  push("lemma5_residual", aggregates.lemma5_max_residual, 1e-7,
       aggregates.lemma5_max_residual <= 1e-7);

  return report;
}

void emit_compliance_csv(const ComplianceReport& report, std::ostream& out) {
  out << "quantity,measured,bound,margin,ok\n";
  for (const ComplianceRow& row : report.rows) {
    out << row.name << ',' << row.measured << ',' << row.bound << ','
        << row.margin << ',' << (row.ok ? 1 : 0) << '\n';
  }
}

}  // namespace dsbcd
