#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dsbcd/oracle.hpp"

using namespace dsbcd;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

QuadraticSensorObjective two_agents_1d() {
  Eigen::MatrixXd anchors(2, 1);
  anchors << 0.0, 1.0;
  return QuadraticSensorObjective(vec({1.0, 1.0}), anchors);
}

Vector random_box_point(const BlockSpec& spec, rng::SequentialRng& r) {
  Vector x(spec.total_dim());
  for (int s = 0; s < spec.block_count(); ++s) {
    const auto& box = std::get<Box>(spec.block(s).set);
    for (int j = 0; j < spec.size(s); ++j)
      x[spec.offset(s) + j] =
          box.lo[j] + (box.hi[j] - box.lo[j]) * r.next_uniform();
  }
  return x;
}

}  // namespace

TEST_CASE("objective values") {
  Eigen::MatrixXd anchor0(1, 2);
  anchor0 << 0.0, 0.0;
  QuadraticSensorObjective zero(vec({1.0}), anchor0);
  CHECK(zero.value(0, vec({0, 0})) == doctest::Approx(0.0));

  Eigen::MatrixXd anchor1(1, 2);
  anchor1 << 1.0, 1.0;
  QuadraticSensorObjective half(vec({0.5}), anchor1);
  CHECK(half.value(0, vec({0, 0})) == doctest::Approx(1.0));

  QuadraticSensorObjective pair = two_agents_1d();
  CHECK(pair.global_value(vec({0.5})) == doctest::Approx(0.5));

  CHECK_THROWS_AS(pair.value(0, vec({1, 2})), std::invalid_argument);
  CHECK_THROWS_AS(pair.value(5, vec({0.5})), std::invalid_argument);
}

TEST_CASE("weights must lie in (0,1]") {
  Eigen::MatrixXd anchors(1, 1);
  anchors << 0.5;
  CHECK_THROWS_AS(QuadraticSensorObjective(vec({0.0}), anchors),
                  std::invalid_argument);
  CHECK_THROWS_AS(QuadraticSensorObjective(vec({1.5}), anchors),
                  std::invalid_argument);
  CHECK_NOTHROW(QuadraticSensorObjective(vec({1.0}), anchors));
}

TEST_CASE("subgradient closed form and finite differences") {
  Eigen::MatrixXd anchors(1, 2);
  anchors << 0.0, 0.0;
  QuadraticSensorObjective obj(vec({1.0}), anchors);
  CHECK((obj.subgradient(0, vec({1, 2})) - vec({2, 4})).norm() == 0.0);
  // the minimizer of the summand has a vanishing gradient
  CHECK(obj.subgradient(0, vec({0, 0})).norm() == 0.0);

  rng::SequentialRng r{{rng::derive(7)}};
  QuadraticSensorObjective rnd = QuadraticSensorObjective::generate(
      3, 6, rng::Stream{rng::derive(1000)});
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    Vector x(6);
    for (int j = 0; j < 6; ++j) x[j] = 2.0 * r.next_normal();
    const int i = static_cast<int>(r.next_below(3));
    const Vector g = rnd.subgradient(i, x);
    for (int j = 0; j < 6; ++j) {
      Vector hi = x, lo = x;
      hi[j] += h;
      lo[j] -= h;
      const double fd = (rnd.value(i, hi) - rnd.value(i, lo)) / (2 * h);
      CHECK(g[j] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("stochastic subgradient") {
  QuadraticSensorObjective obj = QuadraticSensorObjective::generate(
      2, 4, rng::Stream{rng::derive(2000)});
  const Vector x = vec({0.1, -0.2, 0.3, 0.4});

  SUBCASE("no noise equals the exact gradient") {
    const rng::Stream s{rng::derive(1)};
    CHECK((stoch_subgradient(obj, 0, x, NoiseModel::none(), s) -
           obj.subgradient(0, x)).norm() == 0.0);
  }
  SUBCASE("same stream id reproduces the draw") {
    const rng::Stream s{rng::derive(77, 3)};
    const Vector a = stoch_subgradient(obj, 1, x, NoiseModel::gaussian(1.0), s);
    const Vector b = stoch_subgradient(obj, 1, x, NoiseModel::gaussian(1.0), s);
    CHECK((a - b).norm() == 0.0);
  }
  SUBCASE("monte carlo unbiasedness") {
    const Vector g = obj.subgradient(0, x);
    const int draws = 100000;
    Vector mean = Vector::Zero(4);
    for (int d = 0; d < draws; ++d) {
      const rng::Stream s{rng::derive(31337, static_cast<std::uint64_t>(d))};
      mean += stoch_subgradient(obj, 0, x, NoiseModel::gaussian(1.0), s);
    }
    mean /= draws;
    const double band = 4.0 / std::sqrt(static_cast<double>(draws));
    for (int j = 0; j < 4; ++j) CHECK(std::abs(mean[j] - g[j]) < band);
  }
}

TEST_CASE("block stochastic subgradient slices the shared draw") {
  BlockSpec spec({box_block(5, -1.0, 1.0), box_block(5, -1.0, 1.0)});
  QuadraticSensorObjective obj = QuadraticSensorObjective::generate(
      3, 10, rng::Stream{rng::derive(4000)});
  const NoiseModel noise = NoiseModel::gaussian(1.0);
  rng::SequentialRng r{{rng::derive(11)}};
  const Vector x = random_box_point(spec, r);

  const rng::Stream s{rng::derive(55, 1, 9)};
  const Vector full = stoch_subgradient(obj, 1, x, noise, s);
  Vector stitched(10);
  for (int blk = 0; blk < 2; ++blk)
    stitched.segment(spec.offset(blk), spec.size(blk)) =
        block_stoch_subgradient(obj, 1, x, spec, blk, noise, s);
  CHECK((stitched - full).norm() == 0.0);

  SUBCASE("noise free block equals the exact slice") {
    const Vector slice =
        block_stoch_subgradient(obj, 2, x, spec, 1, NoiseModel::none(), s);
    CHECK((slice - obj.subgradient(2, x).segment(5, 5)).norm() == 0.0);
  }
  SUBCASE("single block equals the full draw") {
    BlockSpec whole({box_block(10, -1.0, 1.0)});
    const Vector blk = block_stoch_subgradient(obj, 0, x, whole, 0, noise, s);
    CHECK((blk - stoch_subgradient(obj, 0, x, noise, s)).norm() == 0.0);
  }
  SUBCASE("invalid block index") {
    CHECK_THROWS_AS(block_stoch_subgradient(obj, 0, x, spec, 2, noise, s),
                    std::invalid_argument);
  }
}

TEST_CASE("analytic bounds dominate the sampled second moment") {
  BlockSpec spec({box_block(5, -1.0, 1.0), box_block(5, -1.0, 1.0)});
  const NoiseModel noise = NoiseModel::gaussian(1.0);
  QuadraticSensorObjective obj = QuadraticSensorObjective::generate(
      4, 10, rng::Stream{rng::derive(5000)});
  const SubgradBounds bounds = analytic_bounds(obj, spec, noise);

  // worst case over generated data: |x_j - b_j| <= 2, a <= 1
  const SubgradBounds gen = generator_bounds(spec, noise);
  for (int s = 0; s < 2; ++s) {
    CHECK(gen.per_block[s] == doctest::Approx(std::sqrt(85.0)).epsilon(1e-12));
    CHECK(bounds.per_block[s] <= gen.per_block[s] + 1e-12);
  }
  CHECK(bounds.m2 <= bounds.m1 + 1e-12);
  CHECK(gen.m1 == doctest::Approx(2 * std::sqrt(85.0)));
  CHECK(gen.m2 == doctest::Approx(std::sqrt(2 * 85.0)));

  rng::SequentialRng r{{rng::derive(13)}};
  for (int point = 0; point < 20; ++point) {
    const Vector x = random_box_point(spec, r);
    for (int s = 0; s < 2; ++s) {
      for (int i = 0; i < obj.num_agents(); ++i) {
        double moment = 0.0;
        const int draws = 10000;
        for (int d = 0; d < draws; ++d) {
          const rng::Stream stream{
              rng::derive(8888, static_cast<std::uint64_t>(point),
                          static_cast<std::uint64_t>(i),
                          static_cast<std::uint64_t>(d))};
          moment += block_stoch_subgradient(obj, i, x, spec, s, noise, stream)
                        .squaredNorm();
        }
        moment /= draws;
        CHECK(moment <=
              bounds.per_block[s] * bounds.per_block[s] * (1.0 + 0.05));
      }
    }
  }
}

TEST_CASE("bound degenerate cases") {
  BlockSpec spec({box_block(3, 0.0, 0.0)});
  Eigen::MatrixXd anchors = Eigen::MatrixXd::Zero(2, 3);
  // sigma = 0 and anchors at the single feasible point: all bounds collapse
  QuadraticSensorObjective tiny(vec({1.0, 1.0}), anchors);
  const SubgradBounds b = analytic_bounds(tiny, spec, NoiseModel::none());
  CHECK(b.per_block[0] == doctest::Approx(0.0));
  CHECK(b.m1 == doctest::Approx(0.0));
  CHECK(b.m2 == doctest::Approx(0.0));

  BlockSpec single({box_block(4, -1.0, 1.0)});
  QuadraticSensorObjective obj4 = QuadraticSensorObjective::generate(
      2, 4, rng::Stream{rng::derive(6000)});
  const SubgradBounds sb =
      analytic_bounds(obj4, single, NoiseModel::gaussian(0.5));
  CHECK(sb.m1 == doctest::Approx(sb.per_block[0]));
  CHECK(sb.m2 == doctest::Approx(sb.per_block[0]));
}

TEST_CASE("exact optimum") {
  BlockSpec line({box_block(1, -1.0, 1.0)});
  QuadraticSensorObjective pair = two_agents_1d();
  const Optimum opt = pair.exact_optimum(line);
  CHECK(opt.x[0] == doctest::Approx(0.5));
  CHECK(opt.value == doctest::Approx(0.5));

  SUBCASE("identical interior anchors give a zero minimum") {
    Eigen::MatrixXd anchors(3, 2);
    anchors << 0.25, 0.5, 0.25, 0.5, 0.25, 0.5;
    QuadraticSensorObjective same(vec({0.3, 0.9, 0.5}), anchors);
    BlockSpec spec({box_block(2, -1.0, 1.0)});
    const Optimum o = same.exact_optimum(spec);
    CHECK((o.x - vec({0.25, 0.5})).norm() < 1e-12);
    CHECK(o.value == doctest::Approx(0.0));
  }
  SUBCASE("clip becomes active") {
    Eigen::MatrixXd anchors(1, 1);
    anchors << 1.0;
    QuadraticSensorObjective off(vec({1.0}), anchors);
    BlockSpec spec({box_block(1, -1.0, 0.5)});
    const Optimum o = off.exact_optimum(spec);
    CHECK(o.x[0] == doctest::Approx(0.5));
  }
  SUBCASE("random feasible perturbations never beat the optimum") {
    BlockSpec spec({box_block(3, -1.0, 1.0), box_block(3, -1.0, 1.0)});
    QuadraticSensorObjective obj = QuadraticSensorObjective::generate(
        4, 6, rng::Stream{rng::derive(7000)});
    const Optimum o = obj.exact_optimum(spec);
    rng::SequentialRng r{{rng::derive(19)}};
    for (int trial = 0; trial < 1000; ++trial) {
      Vector z = o.x;
      for (int j = 0; j < 6; ++j) z[j] += 0.5 * r.next_normal();
      z = z.cwiseMax(-1.0).cwiseMin(1.0);
      CHECK(obj.global_value(z) >= o.value - 1e-12);
    }
  }
  SUBCASE("non-box blocks are unsupported") {
    BlockSpec spec({simplex_block(1, Dgf::Entropy)});
    Eigen::MatrixXd anchors(1, 1);
    anchors << 1.0;
    QuadraticSensorObjective obj(vec({1.0}), anchors);
    CHECK_THROWS_AS(obj.exact_optimum(spec), std::runtime_error);
  }
}

TEST_CASE("generation and file loading") {
  QuadraticSensorObjective gen = QuadraticSensorObjective::generate(
      5, 3, rng::Stream{rng::derive(123)});
  CHECK(gen.num_agents() == 5);
  CHECK(gen.dim() == 3);
  for (int i = 0; i < 5; ++i) {
    CHECK(gen.weights()[i] > 0.0);
    CHECK(gen.weights()[i] <= 1.0);
    for (int j = 0; j < 3; ++j) {
      CHECK(gen.anchors()(i, j) >= 0.0);
      CHECK(gen.anchors()(i, j) < 1.0);
    }
  }
  // determinism
  QuadraticSensorObjective again = QuadraticSensorObjective::generate(
      5, 3, rng::Stream{rng::derive(123)});
  CHECK((gen.weights() - again.weights()).norm() == 0.0);
  CHECK((gen.anchors() - again.anchors()).norm() == 0.0);

  const std::string path = "oracle_test_data.txt";
  {
    std::ofstream out(path);
    out << "# a b1 b2\n";
    out << "0.5 0.1 0.9\n";
    out << "1.0 0.4 0.2\n";
  }
  QuadraticSensorObjective loaded = QuadraticSensorObjective::load(path);
  CHECK(loaded.num_agents() == 2);
  CHECK(loaded.dim() == 2);
  CHECK(loaded.weights()[0] == doctest::Approx(0.5));
  CHECK(loaded.anchors()(1, 1) == doctest::Approx(0.2));
  std::remove(path.c_str());

  CHECK_THROWS_AS(QuadraticSensorObjective::load("missing_file.txt"),
                  std::runtime_error);
}
