#include <cmath>
#include <random>

#include "doctest.h"
#include "packp/shiftspace.hpp"

using namespace packp;

namespace {

PeriodicPoint random_point(std::mt19937_64& rng, int k, std::size_t max_period) {
  const std::size_t p = 1 + rng() % max_period;
  std::vector<Symbol> w(p);
  for (auto& a : w) a = static_cast<Symbol>(rng() % static_cast<unsigned>(k));
  return PeriodicPoint::word(w);
}

}  // namespace

TEST_CASE("metric distance") {
  const auto z = PeriodicPoint::constant(1, 0);
  CHECK(metric_distance(z, z) == 0.0);
  CHECK(metric_distance(z, PeriodicPoint::constant(1, 1)) == 1.0);
  std::vector<Symbol> w(8, 0);
  w[3] = 1;
  w[5] = 1;  // -3 == 5 mod 8
  CHECK(metric_distance(z, PeriodicPoint::word(w)) == 0.125);
}

TEST_CASE("bowen distance") {
  const auto x = PeriodicPoint::constant(1, 0);
  std::vector<Symbol> w(16, 0);
  w[1] = 1;
  const auto y = PeriodicPoint::word(w);
  CHECK(bowen_distance(x, y, FiniteSubset::box(1, 1)) == metric_distance(x, y));
  CHECK(metric_distance(x, y) == 0.5);
  CHECK(bowen_distance(x, y, FiniteSubset::box(1, 2)) == 1.0);
}

TEST_CASE("bowen distance is a metric on sampled points") {
  std::mt19937_64 rng(3);
  std::vector<PeriodicPoint> pts;
  for (int i = 0; i < 40; ++i) pts.push_back(random_point(rng, 2, 6));
  const auto F = FiniteSubset::box(1, 3);
  for (const auto& a : pts)
    for (const auto& b : pts) {
      const double dab = bowen_distance(a, b, F);
      CHECK(dab == bowen_distance(b, a, F));
      CHECK((dab == 0.0) == (a.pattern_on(FiniteSubset::cube(1, -60, 60)) == b.pattern_on(FiniteSubset::cube(1, -60, 60))));
      for (std::size_t c = 0; c < 10; ++c) CHECK(dab <= bowen_distance(a, pts[c], F) + bowen_distance(pts[c], b, F));
    }
}

TEST_CASE("ball windows follow the metric") {
  const auto F = FiniteSubset::box(1, 3);
  CHECK(ball_window(F, 0.5, true) == F);
  CHECK(ball_window(F, 0.5, false) == FiniteSubset::cube(1, -1, 4));
  CHECK(ball_window(F, 1.0, true).empty());
  CHECK(ball_window(F, 1.0, false) == F);
  // 0.9: d < 0.9 <=> d <= 1/2 <=> agreement on F
  CHECK(ball_window(F, 0.9, false) == F);
  CHECK(ball_window(F, scale_radius(1), false) == ball_window(F, scale_radius(1), true));
  CHECK(ball_window(F, scale_radius(2), true) == FiniteSubset::cube(1, -2, 5));
  CHECK_THROWS_AS(ball_window(F, 0.0, true), Error);
  CHECK_THROWS_AS(ball_window(F, 1.5, true), Error);
}

TEST_CASE("ball windows agree with the bowen distance") {
  std::mt19937_64 rng(9);
  const auto F = FiniteSubset::box(1, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto x = random_point(rng, 2, 5);
    const auto y = random_point(rng, 2, 5);
    for (double eps : {1.0, 0.5, 0.25, 0.7, 0.3}) {
      for (bool closed : {false, true}) {
        const auto W = ball_window(F, eps, closed);
        const double d = bowen_distance(x, y, F);
        const bool in = closed ? d <= eps : d < eps;
        CHECK(in == (x.pattern_on(W) == y.pattern_on(W)));
      }
    }
  }
}

TEST_CASE("ball window is monotone in F") {
  const auto a = FiniteSubset::box(1, 3), b = FiniteSubset::box(1, 5);
  for (int m = 0; m < 3; ++m) CHECK(ball_window(a, scale_radius(m), true).is_subset_of(ball_window(b, scale_radius(m), true)));
}

TEST_CASE("potential sums") {
  const auto c = LocalPotential::constant(2, 1, 1.5);
  const auto x1 = PeriodicPoint::constant(1, 1);
  CHECK(potential_sum(c, x1, FiniteSubset::box(1, 4)) == 6.0);
  CHECK(potential_sum(LocalPotential::symbol_linear(2, 1, 1.0), x1, FiniteSubset::box(1, 5)) == 5.0);
  const auto prod = LocalPotential::from_function(2, FiniteSubset::box(1, 2),
                                                  [](std::span<const Symbol> s) { return double(s[0] * s[1]); });
  CHECK(potential_sum(prod, PeriodicPoint::word({0, 1}), FiniteSubset::box(1, 4)) == 0.0);
}

TEST_CASE("sup over balls") {
  const auto X = Subshift::full(2);
  const auto F = FiniteSubset::box(1, 3);
  const auto f = LocalPotential::symbol_linear(2, 1, 1.0);
  const auto x = PeriodicPoint::word({1, 0, 0, 1});
  CHECK(potential_sup_ball(X, f, x, F, 0.5, true) == potential_sum(f, x, F));
  CHECK(potential_sup_ball(X, f, x, F, 0.5, false) == potential_sum(f, x, F));
  CHECK(potential_sup_ball(X, LocalPotential::constant(2, 1, 0.7), x, F, 1.0, true) == doctest::Approx(2.1));
  // whole space: every translate can be 1
  CHECK(potential_sup_ball(X, f, x, F, 1.0, true) == 3.0);
}

TEST_CASE("sup over balls matches enumeration of periodic points") {
  std::mt19937_64 rng(21);
  const auto X = Subshift::golden_mean();
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> rule(4);
    for (auto& r : rule) r = std::uniform_real_distribution<double>(-1, 1)(rng);
    const LocalPotential f(2, FiniteSubset::box(1, 2), rule);
    const auto F = FiniteSubset::box(1, 1 + static_cast<std::int64_t>(rng() % 3));
    // period-8 admissible points
    std::vector<PeriodicPoint> pts;
    for (unsigned code = 0; code < 256; ++code) {
      std::vector<Symbol> w(8);
      for (int i = 0; i < 8; ++i) w[i] = (code >> i) & 1;
      const auto p = PeriodicPoint::word(w);
      if (p.admissible_in(X)) pts.push_back(p);
    }
    const auto& x = pts[rng() % pts.size()];
    for (double eps : {0.5, 1.0}) {
      for (bool closed : {false, true}) {
        double best = -1e9;
        for (const auto& y : pts) {
          const double d = bowen_distance(x, y, F);
          if (closed ? d <= eps : d < eps) best = std::max(best, potential_sum(f, y, F));
        }
        const double lo = potential_sum(f, x, F);
        const double sup = potential_sup_ball(X, f, x, F, eps, closed);
        CHECK(sup == doctest::Approx(best).epsilon(1e-12));
        CHECK(lo <= sup + 1e-12);
        CHECK(sup <= lo + static_cast<double>(F.size()) * variation(f, eps) + 1e-12);
      }
    }
  }
}

TEST_CASE("variation") {
  CHECK(variation(LocalPotential::constant(2, 1, 3.0), 1.0) == 0.0);
  const auto g = LocalPotential(3, FiniteSubset::box(1, 1), {0.0, 2.0, -1.0});
  CHECK(variation(g, 0.5) == 0.0);
  CHECK(variation(g, 0.25) == 0.0);
  CHECK(variation(g, 1.0) == 3.0);
}

TEST_CASE("patterns and periodic points") {
  const auto x = PeriodicPoint::word({0, 1, 2});
  CHECK(x.at(Site{4}) == 1);
  CHECK(x.at(Site{-1}) == 2);
  CHECK(x.shifted(Site{1}).at(Site{0}) == 1);
  const auto p = Pattern::word({1, 1}, 3);
  CHECK_FALSE(Subshift::golden_mean().admissible(p));
  CHECK(Subshift::golden_mean().admissible(Pattern::word({1, 0, 1})));
  CHECK_FALSE(PeriodicPoint::word({1}).admissible_in(Subshift::golden_mean()));
  CHECK(PeriodicPoint::word({1, 0}).admissible_in(Subshift::golden_mean()));
  CHECK(Pattern::word({1, 0}).compatible(Pattern::word({0, 2}, 1)));
  CHECK_FALSE(Pattern::word({1, 0}).compatible(Pattern::word({1}, 1)));
}
