#include <doctest.h>

#include <cmath>

#include "dsbcd/engine.hpp"

using namespace dsbcd;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vector uniform_probs(int b) { return Vector::Constant(b, 1.0 / b); }

QuadraticSensorObjective scalar_parabola() {
  // f(x) = x^2 on [-1, 1]
  Eigen::MatrixXd anchors(1, 1);
  anchors << 0.0;
  return QuadraticSensorObjective(vec({1.0}), anchors);
}

MixingSchedule single_agent_schedule() {
  return MixingSchedule(ScheduleKind::CompleteUniform,
                        NetworkParams{1, 0.5, 1}, 0);
}

}  // namespace

TEST_CASE("stepsize schedule") {
  CHECK(stepsize(1.0, 0) == doctest::Approx(1.0));
  CHECK(stepsize(1.0, 3) == doctest::Approx(0.5));
  CHECK(stepsize(2.0, 0) == doctest::Approx(2.0));
  double prev = stepsize(0.7, 0);
  for (long k = 1; k < 50; ++k) {
    const double cur = stepsize(0.7, k);
    CHECK(cur <= prev);
    prev = cur;
  }
  // partial sums stay below the closed-form cap
  double sum = 0.0;
  for (long k = 0; k <= 3; ++k) sum += stepsize(1.0, k);
  CHECK(sum == doctest::Approx(2.7844570503761732).epsilon(1e-12));
  CHECK(sum <= 2.0 * std::sqrt(4.0));
  CHECK_THROWS_AS(stepsize(0.0, 1), std::invalid_argument);
}

TEST_CASE("algo config validation") {
  BlockSpec spec({box_block(2, -1.0, 1.0), box_block(2, -1.0, 1.0)});
  AlgoConfig cfg;
  cfg.rounds = 10;
  cfg.probabilities = vec({0.6, 0.5});
  CHECK_THROWS_AS(cfg.validate(spec, 2), std::invalid_argument);
  cfg.probabilities = uniform_probs(2);
  CHECK_NOTHROW(cfg.validate(spec, 2));

  // zero start must be feasible when no initial points are given
  BlockSpec shifted({box_block(2, 1.0, 2.0)});
  AlgoConfig cfg2;
  cfg2.probabilities = uniform_probs(1);
  CHECK_THROWS_AS(cfg2.validate(shifted, 1), std::invalid_argument);
  cfg2.initial_points = {vec({1.5, 1.5})};
  CHECK_NOTHROW(cfg2.validate(shifted, 1));
}

TEST_CASE("consensus step averages states") {
  SUBCASE("uniform averaging") {
    MixingSchedule s(ScheduleKind::CompleteUniform, NetworkParams{2, 0.5, 1},
                     0);
    RowMatrix x(2, 2);
    x << 0, 2, 2, 0;
    const RowMatrix y = consensus_step(s, 0, x);
    CHECK(y(0, 0) == doctest::Approx(1.0));
    CHECK(y(0, 1) == doctest::Approx(1.0));
    CHECK(y(1, 0) == doctest::Approx(1.0));
    CHECK(y(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("network average is conserved") {
    MixingSchedule s(ScheduleKind::RandomMetropolis, NetworkParams{5, 0.2, 1},
                     3);
    rng::SequentialRng r{{rng::derive(8)}};
    RowMatrix x(5, 3);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 3; ++j) x(i, j) = r.next_normal();
    const RowMatrix y = consensus_step(s, 11, x);
    CHECK((y.colwise().mean() - x.colwise().mean()).norm() < 1e-12);
  }
  SUBCASE("ring part matches dense matvec") {
    MixingSchedule s(ScheduleKind::PeriodicRingParts,
                     NetworkParams{3, 0.25, 3}, 0);
    RowMatrix x(3, 2);
    x << 1, 0, 0, 1, 2, 2;
    const RowMatrix y = consensus_step(s, 1, x);
    const Eigen::MatrixXd expect = s.matrix_at(1) * x;
    CHECK((y - expect).norm() < 1e-14);
  }
}

TEST_CASE("hand traced projected gradient run") {
  // single agent, f(x) = x^2 over [-1,1], no noise, theta = 0.5:
  // alpha_0 = 0.5, so x_1 = clip(1 - 0.5 * 2) = 0, then gradient vanishes
  BlockSpec spec({box_block(1, -1.0, 1.0)});
  QuadraticSensorObjective obj = scalar_parabola();
  MixingSchedule schedule = single_agent_schedule();
  AlgoConfig cfg;
  cfg.algorithm = Algorithm::Dsbcd;
  cfg.rounds = 3;
  cfg.theta = 0.5;
  cfg.probabilities = uniform_probs(1);
  cfg.initial_points = {vec({1.0})};

  Engine engine(spec, schedule, obj, NoiseModel::none(), cfg, 99);
  engine.step();
  CHECK(engine.states()(0, 0) == doctest::Approx(0.0));
  engine.step();
  CHECK(engine.states()(0, 0) == doctest::Approx(0.0));

  // same trace through dsgd
  AlgoConfig cfg2 = cfg;
  cfg2.algorithm = Algorithm::Dsgd;
  Engine engine2(spec, schedule, obj, NoiseModel::none(), cfg2, 99);
  engine2.step();
  CHECK(engine2.states()(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("degenerate sampling keeps unsampled blocks at consensus values") {
  BlockSpec spec({box_block(2, -1.0, 1.0), box_block(2, -1.0, 1.0)});
  QuadraticSensorObjective obj = QuadraticSensorObjective::generate(
      3, 4, rng::Stream{rng::derive(300)});
  MixingSchedule schedule(ScheduleKind::RandomMetropolis,
                          NetworkParams{3, 1.0 / 3, 1}, 4);
  AlgoConfig cfg;
  cfg.rounds = 40;
  cfg.theta = 1.0;
  cfg.probabilities = vec({1.0, 0.0});

  Engine engine(spec, schedule, obj, NoiseModel::gaussian(1.0), cfg, 5);
  RowMatrix prev = engine.states();
  for (long k = 0; k < cfg.rounds; ++k) {
    const RowMatrix y = consensus_step(schedule, k, prev);
    engine.step();
    // block 2 never updates: it stays the consensus mix bit for bit
    CHECK(engine.states().block(0, 2, 3, 2) == y.block(0, 2, 3, 2));
    prev = engine.states();
  }
}

TEST_CASE("projection error is supported on the sampled block only") {
  BlockSpec spec({box_block(3, -1.0, 1.0), box_block(2, -1.0, 1.0),
                  box_block(3, -1.0, 1.0)});
  QuadraticSensorObjective obj = QuadraticSensorObjective::generate(
      4, 8, rng::Stream{rng::derive(301)});
  MixingSchedule schedule(ScheduleKind::RandomMetropolis,
                          NetworkParams{4, 0.25, 1}, 9);
  AlgoConfig cfg;
  cfg.rounds = 50;
  cfg.theta = 1.0;
  cfg.probabilities = uniform_probs(3);

  Engine engine(spec, schedule, obj, NoiseModel::gaussian(1.0), cfg, 17);
  int observed = 0;
  RoundObserver observer = [&](const RoundDetail& d) {
    for (int i = 0; i < 4; ++i) {
      const int zeta = (*d.sampled_blocks)[static_cast<std::size_t>(i)];
      for (int s = 0; s < spec.block_count(); ++s) {
        if (s == zeta) continue;
        const auto e = d.x_after->row(i).segment(spec.offset(s), spec.size(s)) -
                       d.y->row(i).segment(spec.offset(s), spec.size(s));
        CHECK(e.norm() == 0.0);
      }
    }
    ++observed;
  };
  for (long k = 0; k < cfg.rounds; ++k) engine.step(observer);
  CHECK(observed == 50);
}

TEST_CASE("iterates stay feasible") {
  BlockSpec spec({box_block(2, -1.0, 1.0), ball_block(2, 1.0),
                  simplex_block(3, Dgf::Entropy)});
  Vector x0(7);
  x0 << 0, 0, 0, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3;
  QuadraticSensorObjective obj = QuadraticSensorObjective::generate(
      3, 7, rng::Stream{rng::derive(302)});
  MixingSchedule schedule(ScheduleKind::RandomMetropolis,
                          NetworkParams{3, 1.0 / 3, 1}, 10);
  for (Algorithm algo : {Algorithm::Dsbcd, Algorithm::Dsgd}) {
    AlgoConfig cfg;
    cfg.algorithm = algo;
    cfg.rounds = 100;
    cfg.theta = 1.0;
    cfg.probabilities = uniform_probs(3);
    cfg.initial_points = {x0, x0, x0};
    Engine engine(spec, schedule, obj, NoiseModel::gaussian(1.0), cfg, 23);
    for (long k = 0; k < cfg.rounds; ++k) {
      engine.step();
      for (int i = 0; i < 3; ++i)
        CHECK(spec.is_feasible_full(engine.states().row(i).transpose()));
    }
  }
}

TEST_CASE("run outputs and averaging window") {
  BlockSpec spec({box_block(1, -1.0, 1.0)});
  QuadraticSensorObjective obj = scalar_parabola();
  MixingSchedule schedule = single_agent_schedule();

  SUBCASE("T=1 returns the first iterate") {
    AlgoConfig cfg;
    cfg.rounds = 1;
    cfg.theta = 0.25;
    cfg.probabilities = uniform_probs(1);
    cfg.initial_points = {vec({1.0})};
    Engine engine(spec, schedule, obj, NoiseModel::none(), cfg, 1);
    const RunResult result = engine.run({});
    CHECK(result.averaged(0, 0) == doctest::Approx(0.5));  // x_1 = 1 - 0.5
  }
  SUBCASE("same seed gives bit identical results") {
    AlgoConfig cfg;
    cfg.rounds = 50;
    cfg.theta = 1.0;
    cfg.probabilities = uniform_probs(1);
    RunOptions opts;
    opts.f_star = 0.0;
    const RunResult a =
        run(spec, schedule, obj, NoiseModel::gaussian(1.0), cfg, 77, opts);
    const RunResult b =
        run(spec, schedule, obj, NoiseModel::gaussian(1.0), cfg, 77, opts);
    CHECK(a.averaged == b.averaged);
    CHECK(a.final_errors == b.final_errors);
  }
  SUBCASE("noise free single agent error decreases with T") {
    double prev_error = 1e100;
    for (long t : {10L, 100L, 1000L}) {
      AlgoConfig cfg;
      cfg.rounds = t;
      cfg.theta = 1.0;
      cfg.probabilities = uniform_probs(1);
      cfg.initial_points = {vec({1.0})};
      RunOptions opts;
      opts.f_star = 0.0;
      const RunResult result =
          run(spec, schedule, obj, NoiseModel::none(), cfg, 3, opts);
      CHECK(result.final_errors[0] < prev_error);
      prev_error = result.final_errors[0];
    }
  }
}

TEST_CASE("dsbcd with one block and dsgd produce bit identical trajectories") {
  BlockSpec spec({box_block(4, -1.0, 1.0)});
  QuadraticSensorObjective obj = QuadraticSensorObjective::generate(
      3, 4, rng::Stream{rng::derive(303)});
  MixingSchedule schedule(ScheduleKind::RandomMetropolis,
                          NetworkParams{3, 1.0 / 3, 1}, 6);
  AlgoConfig a;
  a.algorithm = Algorithm::Dsbcd;
  a.rounds = 100;
  a.theta = 1.0;
  a.probabilities = uniform_probs(1);
  AlgoConfig b = a;
  b.algorithm = Algorithm::Dsgd;

  Engine dsbcd_engine(spec, schedule, obj, NoiseModel::gaussian(1.0), a, 41);
  Engine dsgd_engine(spec, schedule, obj, NoiseModel::gaussian(1.0), b, 41);
  for (long k = 0; k < 100; ++k) {
    dsbcd_engine.step();
    dsgd_engine.step();
    REQUIRE(dsbcd_engine.states() == dsgd_engine.states());
  }
}

TEST_CASE("telemetry records rounds") {
  BlockSpec spec({box_block(2, -1.0, 1.0), box_block(2, -1.0, 1.0)});
  QuadraticSensorObjective obj = QuadraticSensorObjective::generate(
      3, 4, rng::Stream{rng::derive(304)});
  MixingSchedule schedule(ScheduleKind::RandomMetropolis,
                          NetworkParams{3, 1.0 / 3, 1}, 2);
  const Optimum opt = obj.exact_optimum(spec);
  AlgoConfig cfg;
  cfg.rounds = 20;
  cfg.theta = 1.0;
  cfg.probabilities = uniform_probs(2);

  RunOptions opts;
  opts.record_rounds = true;
  opts.record_states = true;
  opts.track_objective = true;
  opts.f_star = opt.value;
  const RunResult result =
      run(spec, schedule, obj, NoiseModel::gaussian(1.0), cfg, 13, opts);

  REQUIRE(result.round_records.size() == 20);
  REQUIRE(result.state_history.size() == 20);
  for (const RoundRecord& record : result.round_records) {
    CHECK(record.proj_err_norm.size() == 3);
    CHECK(record.sampled_blocks.size() == 3);
    CHECK(record.projections_per_agent == 1);
    CHECK(record.objective_error.size() == 3);
    CHECK(record.network_average.size() == 4);
    for (int i = 0; i < 3; ++i) {
      CHECK(record.objective_error[i] >= -1e-12);
      CHECK(record.sampled_blocks[static_cast<std::size_t>(i)] >= 0);
      CHECK(record.sampled_blocks[static_cast<std::size_t>(i)] < 2);
    }
  }

  // dsgd telemetry reports b projections per agent and no sampled blocks
  AlgoConfig cfg2 = cfg;
  cfg2.algorithm = Algorithm::Dsgd;
  const RunResult result2 =
      run(spec, schedule, obj, NoiseModel::gaussian(1.0), cfg2, 13, opts);
  CHECK(result2.round_records.front().projections_per_agent == 2);
  CHECK(result2.round_records.front().sampled_blocks.empty());
}
