#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "packp/measure.hpp"

using namespace packp;

namespace {

Eigen::MatrixXd two_state(double a, double b) {
  Eigen::MatrixXd P(2, 2);
  P << 1 - a, a, b, 1 - b;
  return P;
}

}  // namespace

TEST_CASE("cylinder masses") {
  const Measure half = ProductMeasure::bernoulli(0.5);
  CHECK(cylinder_mass(half, Pattern::word({0, 1, 1, 0})) == doctest::Approx(0.0625));
  const Measure p3 = ProductMeasure::bernoulli(0.3);
  CHECK(cylinder_mass(p3, Pattern::word({1, 1, 0})) == doctest::Approx(0.063));
  const MarkovMeasure mk(two_state(0.2, 0.6));
  const Measure m = mk;
  const double pi0 = 0.6 / 0.8, pi1 = 0.2 / 0.8;
  CHECK(mk.stationary()(0) == doctest::Approx(pi0));
  CHECK(mk.stationary()(1) == doctest::Approx(pi1));
  CHECK(cylinder_mass(m, Pattern::word({0, 1, 0})) == doctest::Approx(pi0 * 0.2 * 0.6));
  // gap filled by summing over the middle symbol
  const double gap = pi0 * (0.8 * 0.2 + 0.2 * 0.4);
  CHECK(cylinder_mass(m, Pattern::from_pairs({{Site{0}, 0}, {Site{2}, 1}})) == doctest::Approx(gap));
  CHECK_THROWS_AS(cylinder_mass(m, Pattern::from_pairs({{Site{0, 0}, 0}})), Error);
}

TEST_CASE("markov validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0, 0, 1;
  CHECK_THROWS_AS(MarkovMeasure{bad}, Error);
  bad << 0.5, 0.6, 0.5, 0.5;
  CHECK_THROWS_AS(MarkovMeasure{bad}, Error);
}

TEST_CASE("markov masses are consistent") {
  const Measure m = MarkovMeasure(two_state(0.3, 0.9));
  for (int len = 1; len <= 6; ++len) {
    double total = 0;
    oracle::each_word(2, static_cast<std::size_t>(len), [&](const oracle::Word& w) {
      total += cylinder_mass(m, Pattern::word(std::span<const int>(w)));
    });
    CHECK(total == doctest::Approx(1.0));
  }
  // shift invariance
  CHECK(cylinder_mass(m, Pattern::word({0, 1, 1}, 5)) == doctest::Approx(cylinder_mass(m, Pattern::word({0, 1, 1}))));
}

TEST_CASE("ball masses") {
  const Measure half = ProductMeasure::bernoulli(0.5);
  const auto x = PeriodicPoint::word({0, 1, 1, 0, 1, 0, 0, 1, 1, 1});
  const auto F = FiniteSubset::box(1, 3);
  CHECK(ball_mass(half, x, F, 1, true) == doctest::Approx(0.125));
  CHECK(ball_mass(half, x, F, 1, false) == doctest::Approx(1.0 / 32));
  const Measure p3 = ProductMeasure::bernoulli(0.3);
  for (int m = 0; m < 3; ++m) CHECK(ball_mass(p3, x, F, m, false) <= ball_mass(p3, x, F, m, true));
  // product measures factor over disjoint blocks
  const auto a = Pattern::word({0, 1}, 0), b = Pattern::word({1, 1, 0}, 4);
  CHECK(cylinder_mass(p3, a.merge(b)) == doctest::Approx(cylinder_mass(p3, a) * cylinder_mass(p3, b)));
}

TEST_CASE("local pressure") {
  const Measure half = ProductMeasure::bernoulli(0.5);
  const auto sched = FolnerSchedule::boxes(1, 40);
  const auto x = PeriodicPoint::word({0, 1, 1, 0, 1});
  const auto zero = LocalPotential::constant(2, 1, 0.0);
  for (std::size_t n : {5u, 20u, 40u}) {
    const double v = local_pressure(half, zero, x, sched, n, 1).value;
    CHECK(v == doctest::Approx(static_cast<double>(n + 2) / static_cast<double>(n) * std::log(2.0)));
    CHECK(local_pressure(half, LocalPotential::constant(2, 1, 0.4), x, sched, n, 1).value == doctest::Approx(v + 0.4));
  }
  CHECK(local_pressure(half, zero, x, sched, 7, 0).value == doctest::Approx(std::log(2.0)));
  const Measure m = MarkovMeasure([] {
    Eigen::MatrixXd P(2, 2);
    P << 0.5, 0.5, 1.0, 0.0;
    return P;
  }());
  CHECK_THROWS_AS(local_pressure(m, zero, PeriodicPoint::word({1, 1, 0}), sched, 4, 0), Error);
}

TEST_CASE("entropy and expectations") {
  CHECK(ProductMeasure::bernoulli(0.3).entropy() == doctest::Approx(0.610864).epsilon(1e-6));
  const Measure p = ProductMeasure::bernoulli(0.3);
  CHECK(expectation(p, LocalPotential::symbol_linear(2, 1, 2.0)) == doctest::Approx(0.6));
  const MarkovMeasure mk(two_state(0.2, 0.6));
  const double h = -(0.75 * (0.8 * std::log(0.8) + 0.2 * std::log(0.2)) + 0.25 * (0.6 * std::log(0.6) + 0.4 * std::log(0.4)));
  CHECK(mk.entropy() == doctest::Approx(h));
}

TEST_CASE("monte carlo upper pressure") {
  const auto sched = FolnerSchedule::boxes(1, 60);
  TailParams tp;
  tp.sample_count = 100;
  tp.seed = 7;
  const auto a = measure_upper_pressure(ProductMeasure::bernoulli(0.5), LocalPotential::constant(2, 1, 0.0), sched, tp);
  CHECK(a.reference == doctest::Approx(std::log(2.0)));
  const auto b = measure_upper_pressure(ProductMeasure::bernoulli(0.3), LocalPotential::symbol_linear(2, 1, 0.5), sched, tp);
  CHECK(b.reference == doctest::Approx(oracle::entropy(0.3) + 0.15));
  CHECK(std::abs(b.mean - b.reference) < 0.1);
  tp.threads = 3;
  const auto c = measure_upper_pressure(ProductMeasure::bernoulli(0.3), LocalPotential::symbol_linear(2, 1, 0.5), sched, tp);
  CHECK(c.samples == b.samples);
}

TEST_CASE("sampled points follow the measure") {
  const Measure m = MarkovMeasure(two_state(0.1, 0.5));
  auto rng = sample_rng(3, 0);
  const auto x = sample_point(m, 1, 20000, 2, rng);
  double ones = 0, pairs = 0;
  for (std::int64_t h = 0; h < 20000; ++h) {
    ones += x.at(Site{h});
    pairs += x.at(Site{h}) * x.at(Site{h + 1});
  }
  CHECK(ones / 20000 == doctest::Approx(1.0 / 6).epsilon(0.1));
  CHECK(pairs / 20000 == doctest::Approx(1.0 / 12).epsilon(0.15));
}

TEST_CASE("measure packing pressures") {
  const System sys{Subshift::full(2), FolnerSchedule::boxes(1, 40)};
  ScaleParams p;
  p.m = 1;
  p.n_min = 4;
  p.n_max = 30;
  p.s_lo = -3;
  p.s_hi = 3;
  const auto zero = LocalPotential::constant(2, 1, 0.0);
  const Measure half = ProductMeasure::bernoulli(0.5);
  const auto a = measure_packing_pressure(sys, half, zero, 0.3, 3, p);
  CHECK(std::abs(a.estimate.value - std::log(2.0)) <= p.tol_s);
  CHECK(a.typical.mass >= 0.7);
  const auto b = katok_packing_pressure(sys, half, zero, 0.3, 3, p);
  CHECK(std::abs(b.estimate.value - a.estimate.value) <= 2 * p.tol_s);
  const auto c = katok_packing_pressure(sys, half, LocalPotential::constant(2, 1, 0.25), 0.3, 3, p);
  CHECK(std::abs(c.estimate.value - b.estimate.value - 0.25) <= 2 * p.tol_s);
  const auto d0 = measure_packing_pressure(sys, half, zero, 0.05, 0, p);
  CHECK(std::abs(d0.estimate.value - std::log(2.0)) <= p.tol_s);
}

TEST_CASE("typical set of a biased coin at depth beyond the horizon") {
  // Z pinned on [0,12) while n <= 12: finite-stage growth of the typical prefixes.
  const System sys{Subshift::full(2), FolnerSchedule::boxes(1, 12)};
  ScaleParams p;
  p.m = 0;
  p.n_min = 4;
  p.n_max = 12;
  p.tail = 4;
  p.s_lo = -3;
  p.s_hi = 3;
  const Measure b9 = ProductMeasure::bernoulli(0.9);
  const auto zero = LocalPotential::constant(2, 1, 0.0);
  const auto e = measure_packing_pressure(sys, b9, zero, 0.1, 12, p);
  CHECK(e.estimate.value < std::log(2.0) - 0.05);
  CHECK(e.typical.mass >= 0.9);
}
