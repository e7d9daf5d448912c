#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "packp/folner.hpp"

using namespace packp;

TEST_CASE("invariance ratio of boxes") {
  CHECK(invariance_ratio(FiniteSubset::box(1, 10), Site{1}) == Rational(2, 10));
  CHECK(invariance_ratio(FiniteSubset::box(1, 10), Site{0}) == Rational(0, 1));
  CHECK(invariance_ratio(FiniteSubset::box(2, 4), Site{1, 0}) == Rational(1, 2));
}

TEST_CASE("invariance ratio halves when the interval doubles") {
  for (std::int64_t g = 1; g <= 3; ++g)
    for (std::int64_t n = 4; n <= 64; n *= 2) {
      const auto a = invariance_ratio(FiniteSubset::box(1, n), Site{g});
      const auto b = invariance_ratio(FiniteSubset::box(1, 2 * n), Site{g});
      CHECK(a == Rational(2 * b.num, b.den));
    }
}

TEST_CASE("invariance ratio stays in [0,2] and vanishes only on fixed sets") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Site> s;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) s.push_back(Site{static_cast<std::int64_t>(rng() % 12)});
    const FiniteSubset F(s);
    const Site g{static_cast<std::int64_t>(rng() % 7) - 3};
    const auto r = invariance_ratio(F, g);
    CHECK(r >= Rational(0, 1));
    CHECK(r <= Rational(2, 1));
    CHECK((r == Rational(0, 1)) == (F.translate(g) == F));
  }
}

TEST_CASE("(K,delta)-invariance") {
  const FiniteSubset K({Site{0}, Site{1}});
  CHECK(is_kdelta_invariant(FiniteSubset::box(1, 100), K, 0.05));
  CHECK_FALSE(is_kdelta_invariant(FiniteSubset::box(1, 10), K, 0.05));
  CHECK(is_kdelta_invariant(FiniteSubset::box(1, 3), FiniteSubset({Site{0}}), 1e-9));
  CHECK_THROWS_AS(is_kdelta_invariant(FiniteSubset::box(1, 3), K, 0.0), Error);
}

TEST_CASE("(K,delta)-invariance agrees with a set comprehension") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Site> fs, ks;
    const int nf = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < nf; ++i) fs.push_back(Site{static_cast<std::int64_t>(rng() % 16)});
    const int nk = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < nk; ++i) ks.push_back(Site{static_cast<std::int64_t>(rng() % 3)});
    const FiniteSubset F(fs), K(ks);
    const double delta = 0.05 + 0.3 * static_cast<double>(rng() % 10) / 10.0;
    std::size_t count = 0;
    for (std::int64_t g = -10; g < 30; ++g) {
      bool in = false, out = false;
      for (const auto& k : K) {
        const bool c = F.contains(Site{k[0] + g});
        in = in || c;
        out = out || !c;
      }
      if (in && out) ++count;
    }
    const bool expect = static_cast<double>(count) / static_cast<double>(F.size()) < delta;
    CHECK(is_kdelta_invariant(F, K, delta) == expect);
  }
}

TEST_CASE("tempered prefix constant of boxes") {
  const auto z = FolnerSchedule::boxes(1, 60);
  CHECK(tempered_prefix_constant(z, 2) == Rational(1, 1));
  CHECK(tempered_prefix_constant(z, 50) == Rational(98, 50));
  Rational prev(0, 1);
  for (std::size_t N = 2; N <= 40; ++N) {
    const auto c = tempered_prefix_constant(z, N);
    CHECK(c >= prev);
    prev = c;
  }
  // brute union in Z^2
  const auto z2 = FolnerSchedule::boxes(2, 10);
  Rational best(0, 1);
  for (std::int64_t n = 2; n <= 10; ++n) {
    std::set<std::pair<std::int64_t, std::int64_t>> u;
    for (std::int64_t k = 1; k < n; ++k)
      for (std::int64_t a = 0; a < k; ++a)
        for (std::int64_t b = 0; b < k; ++b)
          for (std::int64_t c = 0; c < n; ++c)
            for (std::int64_t d = 0; d < n; ++d) u.insert({c - a, d - b});
    best = std::max(best, Rational(static_cast<std::int64_t>(u.size()), n * n));
  }
  CHECK(tempered_prefix_constant(z2, 10) == best);
  CHECK(best <= Rational(4, 1));
  CHECK_THROWS_AS(tempered_prefix_constant(z, 1), Error);
}

TEST_CASE("growth margin") {
  CHECK(growth_margin(FolnerSchedule::boxes(1, 100), 100) == doctest::Approx(21.7147).epsilon(1e-4));
  CHECK(growth_margin(FolnerSchedule::boxes(2, 10), 10) == doctest::Approx(43.4294).epsilon(1e-4));
  std::vector<FiniteSubset> slow;
  for (int n = 1; n <= 100; ++n)
    slow.push_back(FiniteSubset::box(1, static_cast<std::int64_t>(std::ceil(std::log(static_cast<double>(n))))
                                             + (n == 1 ? 1 : 0)));
  CHECK(growth_margin(FolnerSchedule::custom(slow), 100) == doctest::Approx(1.0857).epsilon(1e-3));
}

TEST_CASE("custom schedules reject shrinking sets") {
  try {
    FolnerSchedule::custom({FiniteSubset::box(1, 3), FiniteSubset::box(1, 2)});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == "folner/cardinality");
  }
}
