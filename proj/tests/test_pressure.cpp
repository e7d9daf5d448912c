#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "packp/pressure.hpp"

using namespace packp;

namespace {

System line(Subshift X, std::size_t count = 60) { return {std::move(X), FolnerSchedule::boxes(1, count)}; }

ScaleParams params(int m, std::size_t n_max = 30) {
  ScaleParams p;
  p.m = m;
  p.n_min = 4;
  p.n_max = n_max;
  p.s_lo = -4;
  p.s_hi = 4;
  return p;
}

}  // namespace

TEST_CASE("separated and spanning sums") {
  const auto full = line(Subshift::full(2));
  const auto zero = LocalPotential::constant(2, 1, 0.0);
  CHECK(std::exp(log_separated_sum(full, SubsetSpec::whole_space(), 0, 3, zero)) == doctest::Approx(8));
  CHECK(std::exp(log_spanning_sum(full, SubsetSpec::whole_space(), 0, 3, zero)) == doctest::Approx(8));
  const auto gm = line(Subshift::golden_mean());
  CHECK(std::exp(log_separated_sum(gm, SubsetSpec::whole_space(), 0, 3, zero)) == doctest::Approx(5));
  const double t = -0.4;
  const auto f = LocalPotential::symbol_linear(2, 1, t);
  CHECK(log_separated_sum(full, SubsetSpec::whole_space(), 0, 3, f) == doctest::Approx(3 * std::log1p(std::exp(t))));
  const auto x = PeriodicPoint::word({1, 0, 1});
  const auto pt = SubsetSpec::single(x);
  CHECK(log_spanning_sum(full, pt, 0, 5, f) == doctest::Approx(potential_sum(f, x, FiniteSubset::box(1, 5))));
  CHECK(log_separated_sum(full, pt, 2, 5, f) == doctest::Approx(potential_sum(f, x, FiniteSubset::box(1, 5))));
}

TEST_CASE("separated sums of cylinder unions match enumeration") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const bool golden = trial % 2;
    const auto sys = line(golden ? Subshift::golden_mean() : Subshift::full(2));
    const std::vector<double> rule{std::uniform_real_distribution<double>(-1, 1)(rng),
                                   std::uniform_real_distribution<double>(-1, 1)(rng),
                                   std::uniform_real_distribution<double>(-1, 1)(rng),
                                   std::uniform_real_distribution<double>(-1, 1)(rng)};
    const LocalPotential f(2, FiniteSubset::cube(1, 0, 2), rule);
    const Pattern c1 = Pattern::word({0}, 1), c2 = Pattern::word({1, 0}, 0);
    const auto Z = SubsetSpec::cylinder_union({c1, c2});
    const std::size_t n = 2 + rng() % 4;
    const int m = static_cast<int>(rng() % 2);
    oracle::ChainProblem p;
    if (golden) p.forbidden = {{1, 1}};
    p.lo = -m;
    p.hi = static_cast<std::int64_t>(n) + std::max(m, 1);
    p.wa = -m;
    p.wb = static_cast<std::int64_t>(n) + m;
    p.fa = 0;
    p.fb = static_cast<std::int64_t>(n);
    p.offsets = {0, 1};
    p.pot = [&](const oracle::Word& w) { return rule[static_cast<std::size_t>(w[0] + 2 * w[1])]; };
    p.member = [&](const oracle::Word& w) {
      const auto at = [&](std::int64_t i) { return w[static_cast<std::size_t>(i - p.lo)]; };
      return at(1) == 0 || (at(0) == 1 && at(1) == 0);
    };
    CHECK(log_separated_sum(sys, Z, m, n, f) == doctest::Approx(oracle::log_class_sum(p)).epsilon(1e-10));
  }
}

TEST_CASE("upper capacity closed forms") {
  const auto zero3 = LocalPotential::constant(3, 1, 0.0);
  const auto e = upper_capacity(line(Subshift::full(3)), SubsetSpec::whole_space(), zero3, params(0));
  CHECK(e.value == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(e.raw_max == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  const auto f = LocalPotential::symbol_linear(2, 1, 0.5);
  for (int m = 0; m < 3; ++m) {
    const auto u = upper_capacity(line(Subshift::full(2)), SubsetSpec::whole_space(), f, params(m));
    CHECK(u.value == doctest::Approx(std::log1p(std::exp(0.5))).epsilon(1e-10));
    CHECK(u.boundary_correction == doctest::Approx(2 * m * std::log(2.0) / 4));
  }
  const auto gm = upper_capacity(line(Subshift::golden_mean()), SubsetSpec::whole_space(),
                                 LocalPotential::constant(2, 1, 0.0), params(0));
  CHECK(gm.series.back().log_sum == doctest::Approx(std::log(oracle::fibonacci(32))));
  CHECK(std::abs(gm.raw_max - std::log((1 + std::sqrt(5.0)) / 2)) < 0.01 + 0.3);
  CHECK(gm.value == doctest::Approx(std::log((1 + std::sqrt(5.0)) / 2)).epsilon(1e-6));
}

TEST_CASE("packing premeasure verdicts") {
  const auto sys = line(Subshift::full(2));
  const auto zero = LocalPotential::constant(2, 1, 0.0);
  auto p = params(0, 20);
  p.n_min = 4;
  const auto v = packing_premeasure(sys, SubsetSpec::whole_space(), zero, 1.0, p);
  CHECK(std::exp(v.log_value) == doctest::Approx(std::pow(2 / std::exp(1.0), 4)));
  CHECK(v.verdict == Verdict::vanishes);
  CHECK(packing_premeasure(sys, SubsetSpec::whole_space(), zero, 0.5, p).verdict == Verdict::diverges);
  const auto pt = SubsetSpec::single(PeriodicPoint::word({0, 1}));
  const auto q = packing_premeasure(sys, pt, zero, 0.3, p);
  CHECK(q.verdict == Verdict::vanishes);
  CHECK(q.log_value == doctest::Approx(-0.3 * 4));
}

TEST_CASE("packing outer measure") {
  const auto sys = line(Subshift::full(2));
  const auto zero = LocalPotential::constant(2, 1, 0.0);
  auto p = params(1, 20);
  for (int D : {0, 1, 3}) {
    p.depth = D;
    CHECK(packing_outer(sys, SubsetSpec::whole_space(), zero, 0.8, p).verdict == Verdict::vanishes);
    CHECK(packing_outer(sys, SubsetSpec::whole_space(), zero, 0.6, p).verdict == Verdict::diverges);
  }
  p.depth = 0;
  CHECK(packing_outer(sys, SubsetSpec::whole_space(), zero, 0.8, p).log_value ==
        packing_premeasure(sys, SubsetSpec::whole_space(), zero, 0.8, p).log_value);
}

TEST_CASE("critical exponents on the full shift") {
  for (double t : {0.0, 0.5, -1.0}) {
    const auto f = LocalPotential::symbol_linear(2, 1, t);
    const double expect = std::log1p(std::exp(t));
    auto p = params(1);
    p.depth = 2;
    const auto sys = line(Subshift::full(2));
    const auto P = packing_pressure(sys, SubsetSpec::whole_space(), f, p);
    const auto B = bowen_pressure(sys, SubsetSpec::whole_space(), f, p);
    CHECK(std::abs(P.value - expect) <= p.tol_s);
    CHECK(std::abs(B.value - expect) <= p.tol_s);
    CHECK(P.bracket_hi - P.bracket_lo <= p.tol_s);
  }
}

TEST_CASE("single point pressure is the period average") {
  const auto rule = std::vector<double>{0.2, -0.7, 1.1, 0.4};
  const LocalPotential f(2, FiniteSubset::cube(1, 0, 2), rule);
  const auto x = PeriodicPoint::word({1, 0, 1, 1, 0});
  double avg = 0;
  for (std::int64_t g = 0; g < 5; ++g) avg += f.at(x, Site{g});
  avg /= 5;
  auto p = params(1, 40);
  p.tail = 5;
  const auto sys = line(Subshift::full(2));
  CHECK(std::abs(packing_pressure(sys, SubsetSpec::single(x), f, p).value - avg) <= p.tol_s);
  CHECK(std::abs(bowen_pressure(sys, SubsetSpec::single(x), f, p).value - avg) <= p.tol_s);
}

TEST_CASE("bracket errors") {
  const auto sys = line(Subshift::full(2));
  auto p = params(0, 20);
  p.s_lo = 1.0;
  p.s_hi = 2.0;
  CHECK_THROWS_AS(packing_pressure(sys, SubsetSpec::whole_space(), LocalPotential::constant(2, 1, 0.0), p), Error);
  try {
    packing_pressure(sys, SubsetSpec::whole_space(), LocalPotential::constant(2, 1, 0.0), p);
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::bracket);
  }
}

TEST_CASE("constant shift moves sums and exponents") {
  std::mt19937_64 rng(4);
  const auto sys = line(Subshift::golden_mean());
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> rule(4);
    for (auto& r : rule) r = std::uniform_real_distribution<double>(-1, 1)(rng);
    const LocalPotential f(2, FiniteSubset::cube(1, -1, 1), rule);
    const double c = std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto g = f.plus(c);
    const auto Z = SubsetSpec::cylinder_union({Pattern::word({0, 1}, 2)});
    for (std::size_t n = 3; n < 9; ++n) {
      const double a = log_separated_sum(sys, Z, 1, n, f);
      const double b = log_separated_sum(sys, Z, 1, n, g);
      CHECK(std::abs(std::exp(b - a - c * static_cast<double>(n)) - 1) < 1e-10);
    }
    auto p = params(1, 30);
    const double pa = packing_pressure(sys, Z, f, p).value, pb = packing_pressure(sys, Z, g, p).value;
    CHECK(std::abs(pb - pa - c) <= p.tol_s);
  }
}

TEST_CASE("sandwich of spanning and separated sums") {
  std::mt19937_64 rng(12);
  const auto sys = line(Subshift::golden_mean());
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> rule(8);
    for (auto& r : rule) r = std::uniform_real_distribution<double>(-1, 1)(rng);
    const LocalPotential f(2, FiniteSubset::cube(1, -1, 2), rule);
    const auto Z = SubsetSpec::cylinder_union({Pattern::word({0}, 1), Pattern::word({1, 0, 1}, 2)});
    for (int m = 0; m < 2; ++m)
      for (std::size_t n = 2; n < 7; ++n) {
        const double Q = log_spanning_sum(sys, Z, m, n, f);
        const double P = log_separated_sum(sys, Z, m, n, f);
        const double Qh = log_spanning_sum(sys, Z, m + 1, n, f);
        const double delta = variation(f, scale_radius(m) / 2);
        CHECK(Q <= P + 1e-12);
        CHECK(P <= static_cast<double>(n) * delta + Qh + 1e-12);
      }
  }
}

TEST_CASE("monotonicity in Z") {
  const auto sys = line(Subshift::full(2));
  const auto f = LocalPotential::symbol_linear(2, 1, 0.3);
  const auto small = SubsetSpec::cylinder_union({Pattern::word({1, 1}, 0)});
  const auto big = SubsetSpec::cylinder_union({Pattern::word({1, 1}, 0), Pattern::word({0}, 3)});
  for (std::size_t n = 4; n < 10; ++n)
    CHECK(log_separated_sum(sys, small, 1, n, f) <= log_separated_sum(sys, big, 1, n, f));
  const auto p = params(1, 24);
  CHECK(packing_pressure(sys, small, f, p).value <= packing_pressure(sys, big, f, p).value + p.tol_s);
}

TEST_CASE("vitali 5r selection") {
  const auto x = PeriodicPoint::word({0, 1, 1});
  const auto F = FiniteSubset::box(1, 4);
  auto one = vitali_5r({{x, F, 0.5}});
  CHECK(one.selected == std::vector<std::size_t>{0});
  auto two = vitali_5r({{x, F, 0.5}, {x, F, 0.5}});
  CHECK(two.selected.size() == 1);
  auto nested = vitali_5r({{x, F, 0.125}, {x, F, 0.5}, {x, F, 0.25}});
  CHECK(nested.selected == std::vector<std::size_t>{1});
  CHECK(nested.coverage_ok);
  CHECK(nested.disjoint);
}

TEST_CASE("mixed-scale search never loses to the best single scale") {
  auto p = params(0, 8);
  p.n_min = 2;
  p.tail = 2;
  const auto sys = line(Subshift::golden_mean());
  const auto Z = SubsetSpec::cylinder_union({Pattern::word({1}, 0), Pattern::word({0, 0}, 1)});
  const auto r = mixed_scale_search(sys, Z, LocalPotential::symbol_linear(2, 1, 0.4), 0.5, p);
  CHECK(r.log_mixed >= r.log_single);
}

TEST_CASE("cover refinement witness") {
  auto p = params(2, 24);
  p.depth = 2;
  const auto sys = line(Subshift::golden_mean());
  const auto w = cover_refinement_witness(sys, SubsetSpec::whole_space(), LocalPotential::symbol_linear(2, 1, 0.2), p, 0.01);
  CHECK(w.holds);
  CHECK(w.pieces.size() == 3);
}
