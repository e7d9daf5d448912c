#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "packp/generic.hpp"

using namespace packp;

namespace {

FiniteSubset line(std::int64_t lo, std::int64_t hi) { return FiniteSubset::cube(1, lo, hi); }

/// log sum_{j : |j/n - p| <= eta} C(n,j) e^{t j}
double binomial_type_sum(int n, double p, double eta, double t) {
  double best = -INFINITY;
  std::vector<double> terms;
  for (int j = 0; j <= n; ++j)
    if (std::abs(static_cast<double>(j) / n - p) <= eta + 1e-12) {
      terms.push_back(oracle::log_binomial(n, j) + t * j);
      best = std::max(best, terms.back());
    }
  double s = 0;
  for (double v : terms) s += std::exp(v - best);
  return best + std::log(s);
}

}  // namespace

TEST_CASE("empirical measures") {
  const auto x = PeriodicPoint::word({0, 1, 1, 0});
  const auto e1 = empirical_measure(x, 2, line(0, 4), FiniteSubset::ball(1, 0));
  CHECK(e1.frequency == std::vector<double>{0.5, 0.5});
  const auto e2 = empirical_measure(x, 2, line(0, 4), line(0, 2));
  CHECK(e2.frequency == std::vector<double>{0.25, 0.25, 0.25, 0.25});

  const Measure mu = ProductMeasure::bernoulli(0.3);
  const auto C1 = FrequencyNeighborhood::around(mu, FiniteSubset::ball(1, 0), 0.1);
  CHECK(C1.center[0] == doctest::Approx(0.7));
  CHECK(C1.center[1] == doctest::Approx(0.3));
  const auto C2 = FrequencyNeighborhood::around(mu, line(0, 2), 0.1);
  CHECK(C2.center[0] == doctest::Approx(0.49));
  CHECK(C2.center[1] == doctest::Approx(0.21));
  CHECK(C2.center[3] == doctest::Approx(0.09));
  CHECK_THROWS_AS(FrequencyNeighborhood::around(mu, line(1, 3), 0.1), Error);
  CHECK_THROWS_AS(FrequencyNeighborhood::around(mu, line(0, 1), 0.0), Error);
  CHECK_THROWS_AS(C2.contains(e1), Error);
}

TEST_CASE("frequency membership along the schedule") {
  const auto sched = FolnerSchedule::boxes(1, 60);
  const Measure half = ProductMeasure::bernoulli(0.5);
  const auto C = FrequencyNeighborhood::around(half, FiniteSubset::ball(1, 0), 0.1);
  CHECK(in_RNm(PeriodicPoint::word({0, 1}), sched, 10, 60, C));
  CHECK_FALSE(in_RNm(PeriodicPoint::constant(1, 0), sched, 10, 60, C));
  CHECK(in_XFC(PeriodicPoint::word({0, 0, 1}), sched, 3, FrequencyNeighborhood::around(ProductMeasure::bernoulli(0.3), FiniteSubset::ball(1, 0), 0.05)));
  CHECK_THROWS_AS(in_RNm(PeriodicPoint::word({0, 1}), sched, 60, 60, C), Error);
}

TEST_CASE("generic points of a Bernoulli measure stay in R_N") {
  const auto sched = FolnerSchedule::boxes(1, 150);
  const Measure mu = ProductMeasure::bernoulli(0.5);
  const auto C = FrequencyNeighborhood::around(mu, FiniteSubset::ball(1, 0), 0.2);
  int hits = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto rng = sample_rng(7, s);
    hits += in_RNm(sample_point(mu, 1, 151, 0, rng), sched, 100, 150, C) ? 1 : 0;
  }
  CHECK(hits >= 190);
}

TEST_CASE("restricted sums on the full shift match binomial type counts") {
  const auto sched = FolnerSchedule::boxes(1, 100);
  const System sys{Subshift::full(2), sched};
  const Measure mu = ProductMeasure::bernoulli(0.3);
  const auto zero = LocalPotential::constant(2, 1, 0.0);
  for (double eta : {0.2, 0.1, 0.05}) {
    const auto C = FrequencyNeighborhood::around(mu, FiniteSubset::ball(1, 0), eta);
    for (int m : {0, 1, 2}) {
      for (int n : {7, 20, 100}) {
        const auto r = lemma51_sum(sys, C, static_cast<std::size_t>(n), m, zero);
        CHECK(r.route == "type-count scan");
        CHECK(r.log_sum == doctest::Approx(2 * m * std::log(2.0) + binomial_type_sum(n, 0.3, eta, 0.0)).epsilon(1e-10));
      }
    }
  }
  const double t = 0.7;
  const auto lin = LocalPotential::symbol_linear(2, 1, t);
  const auto C = FrequencyNeighborhood::around(mu, FiniteSubset::ball(1, 0), 0.1);
  const auto r = lemma51_sum(sys, C, 30, 1, lin);
  CHECK(r.log_sum == doctest::Approx(2 * std::log(2.0) + binomial_type_sum(30, 0.3, 0.1, t)).epsilon(1e-10));
}

TEST_CASE("restricted sum rate shrinks with the neighbourhood") {
  const System sys{Subshift::full(2), FolnerSchedule::boxes(1, 100)};
  const Measure mu = ProductMeasure::bernoulli(0.3);
  const auto zero = LocalPotential::constant(2, 1, 0.0);
  double prev = INFINITY;
  for (double eta : {0.2, 0.1, 0.05}) {
    const auto C = FrequencyNeighborhood::around(mu, FiniteSubset::ball(1, 0), eta);
    const double rate = lemma51_sum(sys, C, 100, 1, zero).rate;
    CHECK(rate <= prev);
    CHECK(rate >= oracle::entropy(0.3) - 0.05);
    prev = rate;
  }
  CHECK(prev == doctest::Approx((2 * std::log(2.0) + binomial_type_sum(100, 0.3, 0.05, 0.0)) / 100));
}

TEST_CASE("restricted sums on the golden mean shift vs enumeration") {
  const auto sched = FolnerSchedule::boxes(1, 12);
  const System sys{Subshift::golden_mean(), sched};
  const Measure mu = ProductMeasure::bernoulli(0.3);
  const auto pot = LocalPotential::from_function(2, line(0, 2), [](std::span<const Symbol> s) {
    return 0.4 * s[0] - 0.9 * s[0] * s[1] + 0.25 * s[1];
  });
  for (double eta : {0.35, 0.2, 0.12}) {
    const auto C = FrequencyNeighborhood::around(mu, line(0, 2), eta);
    for (int n : {5, 9}) {
      const int m = 1;
      oracle::ChainProblem p;
      p.forbidden = {{1, 1}};
      p.lo = p.wa = -m;
      p.hi = p.wb = n + m;
      p.fa = 0;
      p.fb = n;
      p.offsets = {0, 1};
      p.pot = [](const oracle::Word& w) { return 0.4 * w[0] - 0.9 * w[0] * w[1] + 0.25 * w[1]; };
      p.member = [&](const oracle::Word& w) {
        std::vector<double> c(4, 0.0);
        for (int g = 0; g < n; ++g) c[static_cast<std::size_t>(w[g + m] + 2 * w[g + m + 1])] += 1.0 / n;
        for (std::size_t i = 0; i < 4; ++i)
          if (std::abs(c[i] - C.center[i]) > eta + 1e-12) return false;
        return true;
      };
      const auto r = lemma51_sum(sys, C, static_cast<std::size_t>(n), m, pot);
      const double expect = oracle::log_class_sum(p);
      if (std::isinf(expect)) {
        CHECK(std::isinf(r.log_sum));
      } else {
        CHECK(r.log_sum == doctest::Approx(expect).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("potential reaching past the window takes the enumeration route") {
  const System sys{Subshift::golden_mean(), FolnerSchedule::boxes(1, 8)};
  const auto C = FrequencyNeighborhood::around(ProductMeasure::bernoulli(0.3), FiniteSubset::ball(1, 0), 0.25);
  const auto pot = LocalPotential::from_function(2, FiniteSubset(std::vector<Site>{Site{0}, Site{2}}),
                                                 [](std::span<const Symbol> s) { return 0.5 * s[1] - 0.3 * s[0]; });
  const int n = 6, m = 1;
  oracle::ChainProblem p;
  p.forbidden = {{1, 1}};
  p.lo = p.wa = -m;
  p.wb = n + m;
  p.hi = n + 2;
  p.fa = 0;
  p.fb = n;
  p.offsets = {0, 2};
  p.pot = [](const oracle::Word& w) { return 0.5 * w[1] - 0.3 * w[0]; };
  p.member = [&](const oracle::Word& w) {
    int ones = 0;
    for (int g = 0; g < n; ++g) ones += w[static_cast<std::size_t>(g + m)];
    return std::abs(static_cast<double>(ones) / n - 0.3) <= 0.25 + 1e-12;
  };
  const auto r = lemma51_sum(sys, C, n, m, pot);
  CHECK(r.route == "enumeration");
  CHECK(r.log_sum == doctest::Approx(oracle::log_class_sum(p)).epsilon(1e-10));

  const auto wide = FrequencyNeighborhood::around(ProductMeasure::bernoulli(0.3), line(0, 3), 0.25);
  try {
    lemma51_sum(sys, wide, n, 1, LocalPotential::constant(2, 1, 0.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "generic/window");
  }
}

TEST_CASE("local entropy at a fixed point and for sampled points") {
  const Measure mu = ProductMeasure::bernoulli(0.3);
  const auto sched = FolnerSchedule::boxes(1, 200);
  const auto rec = brin_katok_local(mu, PeriodicPoint::constant(1, 0), sched, 1, 50, 5);
  REQUIRE(rec.series.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    const double n = 46.0 + static_cast<double>(i);
    CHECK(rec.series[i] == doctest::Approx(-(n + 2) * std::log(0.7) / n));
  }
  CHECK(rec.tail_max == doctest::Approx(-48 * std::log(0.7) / 46));

  const auto est = brin_katok_sampled(mu, sched, 200, 1, 200, 3, 1);
  CHECK(est.reference == doctest::Approx(oracle::entropy(0.3)));
  CHECK(std::abs(est.mean - est.reference) <= 0.05);
  const auto par = brin_katok_sampled(mu, sched, 200, 1, 200, 3, 4);
  CHECK(par.samples == est.samples);

  const Subshift gm = Subshift::golden_mean();
  Eigen::MatrixXd P(2, 2);
  P << 0.5, 0.5, 1.0, 0.0;
  const Measure parry_like = MarkovMeasure(P);
  CHECK_THROWS_AS(brin_katok_local(parry_like, PeriodicPoint::constant(1, 1), sched, 1, 20, 3), Error);
}

TEST_CASE("mistake counts and mistake balls") {
  const auto x = PeriodicPoint::constant(1, 0);
  std::vector<Symbol> w(10, 0);
  w[0] = 1;
  const auto y = PeriodicPoint::word(w);
  const auto F = line(0, 10);
  CHECK(mistake_count(F, x, y, 0.75) == 1);
  CHECK(mistake_count(F, x, y, 0.5) == 1);
  CHECK(mistake_count(F, x, y, 0.3) == 3);
  CHECK(mistake_count(F, x, y, 0.2) == 5);
  CHECK(mistake_count(F, x, x, 0.2) == 0);

  const auto spec = MistakeBallSpec::constant({0.2, 0.3, 0.75}, 0.1);
  CHECK(mistake_ball_membership(spec, F, x, y, 0.75));
  CHECK_FALSE(mistake_ball_membership(spec, F, x, y, 0.3));
  try {
    mistake_ball_membership(spec, F, x, y, 0.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "generic/off_grid");
  }
  CHECK_THROWS_AS(MistakeBallSpec({0.3, 0.2}, {0.1, 0.1}), Error);
  CHECK_THROWS_AS(MistakeBallSpec({0.2, 0.3}, {0.2, 0.1}), Error);
  CHECK_THROWS_AS(MistakeBallSpec({0.2, 1.5}, {0.1, 0.1}), Error);
  const MistakeBallSpec ramp({0.2, 0.3}, {0.1, 0.4});
  CHECK(ramp.at(0.3) == 0.4);
  CHECK(mistake_ball_membership(ramp, F, x, y, 0.3));
}

TEST_CASE("mistake count agrees with the metric") {
  std::mt19937_64 rng(11);
  const auto F = line(-3, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Symbol> a(7), b(7);
    for (auto& s : a) s = static_cast<Symbol>(rng() % 2);
    for (auto& s : b) s = static_cast<Symbol>(rng() % 2);
    const auto x = PeriodicPoint::word(a), y = PeriodicPoint::word(b);
    for (double eps : {0.1, 0.25, 0.3, 0.5, 0.9}) {
      std::size_t bad = 0;
      for (const auto& h : F) bad += metric_distance(x.shifted(h), y.shifted(h)) > eps ? 1 : 0;
      CHECK(mistake_count(F, x, y, eps) == bad);
    }
  }
}

TEST_CASE("almost specification witnesses") {
  const auto spec0 = MistakeBallSpec::constant({0.3, 0.75}, 0.0);
  {
    const Subshift X = Subshift::full(2);
    std::vector<OrbitSegment> segs{{line(0, 5), PeriodicPoint::constant(1, 0), 0.3},
                                   {line(10, 15), PeriodicPoint::constant(1, 1), 0.3}};
    const auto w = almost_spec_witness(X, segs, spec0);
    REQUIRE(w.has_value());
    for (const auto& s : segs) CHECK(mistake_ball_membership(spec0, s.F, s.x, *w, s.eps));
  }
  {
    // 1 0 1 | 1 0 1 meets in "11" and needs a repair
    const Subshift X = Subshift::golden_mean();
    std::vector<OrbitSegment> segs{{line(0, 3), PeriodicPoint::word({1, 0}), 0.75},
                                   {line(3, 6), PeriodicPoint::word({0, 1}), 0.75}};
    CHECK_FALSE(almost_spec_witness(X, segs, spec0).has_value());
    const auto loose = MistakeBallSpec::constant({0.75}, 0.4);
    const auto w = almost_spec_witness(X, segs, loose);
    REQUIRE(w.has_value());
    CHECK(w->admissible_in(X));
    for (const auto& s : segs) CHECK(mistake_ball_membership(loose, s.F, s.x, *w, s.eps));
  }
  {
    const Subshift X = Subshift::full(2, 2);
    const auto checker = PeriodicPoint(Site{2, 2}, {0, 1, 1, 0});
    std::vector<OrbitSegment> segs{{FiniteSubset::cube(2, 0, 3), checker, 0.3},
                                   {FiniteSubset::cube(2, 5, 7), PeriodicPoint::constant(2, 1), 0.75}};
    const auto w = almost_spec_witness(X, segs, spec0);
    REQUIRE(w.has_value());
    for (const auto& s : segs) CHECK(mistake_ball_membership(spec0, s.F, s.x, *w, s.eps));
  }
  std::vector<OrbitSegment> overlap{{line(0, 5), PeriodicPoint::constant(1, 0), 0.3},
                                    {line(4, 8), PeriodicPoint::constant(1, 1), 0.3}};
  try {
    almost_spec_witness(Subshift::full(2), overlap, spec0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "generic/overlap");
  }
}
