// Acceptance report: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "oracle.hpp"
#include "packp/experiment.hpp"
#include "packp/generic.hpp"

using namespace packp;

namespace {

constexpr double kTolS = 1e-3;
constexpr double kGoldenTol = 0.01;
constexpr double kChainMargin = 2 * kTolS;
constexpr double kShiftRelErr = 1e-10;
constexpr double kSandwichSlack = 1e-12;  // float slack on log sums
constexpr double kVariationalTol = 0.02;
constexpr double kGibbsTol = 0.05;
constexpr double kLemmaTol = 0.05;
constexpr double kBrinKatokTol = 0.05;
constexpr double kCaseSeconds = 10;
constexpr double kChainSeconds = 300;

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

ScaleParams scale(int m, std::size_t n_max) {
  ScaleParams p;
  p.m = m;
  p.n_max = n_max;
  return p;
}

// Random cylinder union admissible in X, plus a random two-site potential.
struct Instance {
  System sys;
  SubsetSpec Z;
  LocalPotential f;
};

Instance random_instance(std::mt19937_64& rng, bool golden, std::size_t count) {
  Subshift X = golden ? Subshift::golden_mean() : Subshift::full(2);
  std::uniform_int_distribution<int> bit(0, 1), len(1, 3), off(0, 2), ncyl(1, 3);
  std::vector<Pattern> cyl;
  while (cyl.empty()) {
    const int c = ncyl(rng);
    for (int i = 0; i < c; ++i) {
      std::vector<Symbol> w(static_cast<std::size_t>(len(rng)));
      for (auto& s : w) s = static_cast<Symbol>(bit(rng));
      Pattern p = Pattern::word(w, off(rng));
      if (X.admissible(p)) cyl.push_back(std::move(p));
    }
  }
  std::vector<double> rule(4);
  for (auto& r : rule) r = std::uniform_real_distribution<double>(-1, 1)(rng);
  return {System{std::move(X), FolnerSchedule::boxes(1, count)}, SubsetSpec::cylinder_union(std::move(cyl)),
          LocalPotential(2, FiniteSubset::cube(1, 0, 2), rule)};
}

// ---------------------------------------------------------------------------

Outcome c1_closed_form() {
  int cases = 0, bad = 0;
  double worst = 0, slowest = 0;
  for (int k : {2, 3})
    for (double t : {0.0, 0.5, -1.0})
      for (int m : {0, 1, 2}) {
        const auto t0 = Clock::now();
        const System sys{Subshift::full(k), FolnerSchedule::boxes(1, 60)};
        const auto f = LocalPotential::symbol_linear(k, 1, t);
        double z = 0;
        for (int a = 0; a < k; ++a) z += std::exp(t * a);
        const double truth = std::log(z);
        const auto p = scale(m, 60);
        const auto Z = SubsetSpec::whole_space();
        for (double v : {packing_pressure(sys, Z, f, p).value, bowen_pressure(sys, Z, f, p).value,
                         upper_capacity(sys, Z, f, p).value}) {
          worst = std::max(worst, std::abs(v - truth));
          if (std::abs(v - truth) > kTolS) ++bad;
        }
        const double dt = seconds_since(t0);
        slowest = std::max(slowest, dt);
        if (dt > kCaseSeconds) ++bad;
        ++cases;
      }
  return {bad == 0, fmt("%g cases, max |est - log sum e^f| = %.2e (tol %.0e), slowest case %.2fs", cases,
                        worst, kTolS, slowest) +
                        fmt(" (limit %gs)", kCaseSeconds)};
}

Outcome c2_golden_mean() {
  const System sys{Subshift::golden_mean(), FolnerSchedule::boxes(1, 30)};
  const auto est = upper_capacity(sys, SubsetSpec::whole_space(), LocalPotential::constant(2, 1, 0.0), scale(0, 30));
  const double log_phi = std::log((1 + std::sqrt(5.0)) / 2);
  const double at30 = std::log(oracle::fibonacci(32)) / 30;
  const double series30 = est.series.back().log_sum / 30;
  const bool pass = std::abs(est.value - log_phi) <= kGoldenTol && std::abs(at30 - log_phi) <= kGoldenTol &&
                    std::abs(series30 - at30) <= 1e-12;
  return {pass, fmt("estimate %.6f, (1/30) log Fib(32) = %.6f, engine at n=30 %.6f, log phi %.6f", est.value, at30,
                    series30, log_phi) +
                    fmt(" (tol %g)", kGoldenTol)};
}

Outcome c3_chain() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = INFINITY;
  int checks = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto in = random_instance(rng, trial % 2 == 1, 30);
    for (int m : {0, 1}) {
      const auto p = scale(m, 30);
      const double b = bowen_pressure(in.sys, in.Z, in.f, p).value;
      const double k = packing_pressure(in.sys, in.Z, in.f, p).value;
      const double u = upper_capacity(in.sys, in.Z, in.f, p).value;
      worst = std::min({worst, k - b, u - k});
      checks += 2;
    }
  }
  const double dt = seconds_since(t0);
  return {worst >= -kChainMargin && dt <= kChainSeconds,
          fmt("%g inequalities on 50 subsets at m in {0,1}, min margin %.2e (floor -%.0e), %.1fs", checks, worst,
              kChainMargin, dt) +
              fmt(" (limit %gs)", kChainSeconds)};
}

Outcome c4_constant_shift() {
  std::mt19937_64 rng(7);
  double worst_rel = 0, worst_exp = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto in = random_instance(rng, trial % 2 == 1, 30);
    const double c = std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto g = in.f.plus(c);
    for (int m : {0, 1})
      for (std::size_t n = 2; n <= 10; ++n) {
        const double a = log_separated_sum(in.sys, in.Z, m, n, in.f);
        const double b = log_separated_sum(in.sys, in.Z, m, n, g);
        worst_rel = std::max(worst_rel, std::abs(std::expm1(b - a - c * static_cast<double>(n))));
      }
    if (trial % 5 == 0) {
      const auto p = scale(1, 30);
      worst_exp = std::max(worst_exp, std::abs(packing_pressure(in.sys, in.Z, g, p).value -
                                               packing_pressure(in.sys, in.Z, in.f, p).value - c));
      worst_exp = std::max(worst_exp, std::abs(bowen_pressure(in.sys, in.Z, g, p).value -
                                               bowen_pressure(in.sys, in.Z, in.f, p).value - c));
    }
  }
  return {worst_rel <= kShiftRelErr && worst_exp <= kTolS,
          fmt("max relative error %.2e (tol %.0e), max exponent shift error %.2e (tol %.0e)", worst_rel, kShiftRelErr,
              worst_exp, kTolS)};
}

Outcome c5_sandwich() {
  std::mt19937_64 rng(11);
  int checks = 0, bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto in = random_instance(rng, trial % 2 == 1, 30);
    for (int m : {0, 1})
      for (std::size_t n = 2; n <= 8; ++n) {
        const double Q = log_spanning_sum(in.sys, in.Z, m, n, in.f);
        const double P = log_separated_sum(in.sys, in.Z, m, n, in.f);
        const double Qh = log_spanning_sum(in.sys, in.Z, m + 1, n, in.f);
        const double delta = variation(in.f, scale_radius(m) / 2);
        if (!(Q <= P + kSandwichSlack)) ++bad;
        if (!(P <= static_cast<double>(n) * delta + Qh + kSandwichSlack)) ++bad;
        checks += 2;
      }
  }
  return {bad == 0, fmt("%g of %g inequalities violated", bad, checks)};
}

Outcome c6_variational() {
  double worst_val = 0, worst_p = 0;
  for (double t : {0.0, 0.5, -1.0}) {
    const auto f = LocalPotential::symbol_linear(2, 1, t);
    const System sys{Subshift::full(2), FolnerSchedule::boxes(1, 60)};
    double best = -INFINITY, best_p = 0;
    for (int i = 1; i <= 9; ++i) {
      const double p = i / 10.0;
      TailParams tp;
      tp.sample_count = 20;
      tp.n_max = 40;
      const double ref = measure_upper_pressure(ProductMeasure::bernoulli(p), f, sys.schedule, tp).reference;
      if (ref > best) best = ref, best_p = p;
    }
    const double packing = packing_pressure(sys, SubsetSpec::whole_space(), f, scale(1, 60)).value;
    worst_val = std::max(worst_val, std::abs(best - packing));
    worst_p = std::max(worst_p, std::abs(best_p - std::exp(t) / (1 + std::exp(t))));
  }
  return {worst_val <= kVariationalTol && worst_p <= kGibbsTol,
          fmt("t in {0,0.5,-1}: max |grid max - packing| = %.4f (tol %g), max |p* - Gibbs| = %.4f (tol %g)", worst_val,
              kVariationalTol, worst_p, kGibbsTol)};
}

Outcome c7_theorem12() {
  const auto code = SlidingBlockCode::one_block(Subshift::full(4), 2, {0, 1, 0, 1});
  const auto f = LocalPotential::constant(2, 1, 0.0);
  const double l2 = std::log(2.0);
  double worst = 0, min_margin = INFINITY;
  for (int m : {0, 1}) {
    auto p = scale(m, 14);
    const auto r = theorem12_check(code, FolnerSchedule::boxes(1, 40), SubsetSpec::whole_space(), f, p, 1);
    worst = std::max({worst, std::abs(r.lhs - l2), std::abs(r.mid - 2 * l2), std::abs(r.rhs - 2 * l2)});
    min_margin = std::min({min_margin, r.margin_left, r.margin_right});
  }
  return {worst <= kTolS && min_margin >= -kChainMargin,
          fmt("m in {0,1}: max deviation from (ln2, ln4, 2ln2) = %.2e (tol %.0e), min margin %.2e (floor -%.0e)", worst,
              kTolS, min_margin, kChainMargin)};
}

Outcome c8_lemma51() {
  const System sys{Subshift::full(2), FolnerSchedule::boxes(1, 100)};
  const Measure mu = ProductMeasure::bernoulli(0.3);
  const auto zero = LocalPotential::constant(2, 1, 0.0);
  std::vector<double> rates;
  double worst_oracle = 0;
  for (double eta : {0.2, 0.1, 0.05}) {
    const auto C = FrequencyNeighborhood::around(mu, FiniteSubset::ball(1, 0), eta);
    const double rate = lemma51_sum(sys, C, 100, 1, zero).rate;
    // type classes j/100 within eta of 0.3, times 2^2 free window symbols
    double lse = -INFINITY;
    for (int j = 0; j <= 100; ++j)
      if (std::abs(j / 100.0 - 0.3) <= eta + 1e-12) {
        const double v = oracle::log_binomial(100, j);
        lse = std::max(lse, v) + std::log1p(std::exp(-std::abs(lse - v)));
      }
    worst_oracle = std::max(worst_oracle, std::abs(rate - (lse + 2 * std::log(2.0)) / 100));
    rates.push_back(rate);
  }
  const bool monotone = rates[0] > rates[1] && rates[1] > rates[2];
  const double gap = std::abs(rates[2] - oracle::entropy(0.3));
  return {monotone && gap <= kLemmaTol && worst_oracle <= 1e-9,
          fmt("rates %.4f > %.4f > %.4f, |rate(0.05) - H(0.3)| = %.4f", rates[0], rates[1], rates[2], gap) +
              fmt(" (tol %g), max oracle mismatch %.1e", kLemmaTol, worst_oracle)};
}

Outcome c9_brin_katok() {
  const auto sched = FolnerSchedule::boxes(1, 200);
  const Measure mu = ProductMeasure::bernoulli(0.3);
  const auto a = brin_katok_sampled(mu, sched, 200, 1, 200, 42, 1);
  const auto b = brin_katok_sampled(mu, sched, 200, 1, 200, 42, 4);
  const double gap = std::abs(a.mean - oracle::entropy(0.3));
  const bool same = a.samples == b.samples && a.mean == b.mean;
  return {gap <= kBrinKatokTol && same && a.standard_error > 0,
          fmt("mean %.4f, SE %.4f, |mean - H(0.3)| = %.4f (tol %g)", a.mean, a.standard_error, gap, kBrinKatokTol) +
              (same ? ", identical across reruns" : ", NOT deterministic")};
}

Outcome c10_vitali() {
  std::mt19937_64 rng(99);
  int bad = 0;
  for (int fam = 0; fam < 1000; ++fam) {
    const auto F = FiniteSubset::box(1, 1 + static_cast<std::int64_t>(rng() % 4));
    std::vector<BowenBall> balls;
    const std::size_t count = 2 + rng() % 10;
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<Symbol> w(8);
      for (auto& s : w) s = static_cast<Symbol>(rng() % 2);
      balls.push_back({PeriodicPoint::word(w), F, scale_radius(static_cast<int>(rng() % 4)), true});
    }
    const auto r = vitali_5r(balls);
    // independent checks by Bowen distance: same F, so closed balls of radius
    // r_a, r_b are disjoint iff d_F(x_a, x_b) > max(r_a, r_b)
    bool ok = r.disjoint && r.coverage_ok && !r.selected.empty();
    for (std::size_t a = 0; a < r.selected.size(); ++a)
      for (std::size_t b = a + 1; b < r.selected.size(); ++b) {
        const auto &A = balls[r.selected[a]], &B = balls[r.selected[b]];
        if (!(bowen_distance(A.center, B.center, F) > std::max(A.radius, B.radius))) ok = false;
      }
    for (const auto& ball : balls) {
      bool covered = false;
      for (std::size_t j : r.selected) {
        const auto& S = balls[j];
        if (bowen_distance(ball.center, S.center, F) <= 5 * S.radius && ball.radius <= 5 * S.radius) covered = true;
      }
      if (!covered) ok = false;
    }
    if (!ok) ++bad;
  }
  return {bad == 0, fmt("%g of 1000 families failed disjointness or 5r coverage", bad)};
}

Outcome c11_folner() {
  const auto sched = FolnerSchedule::boxes(1, 200);
  bool ok = true;
  double worst = 0;
  for (std::size_t N = 2; N <= 200; ++N) {
    const Rational c = tempered_prefix_constant(sched, N);
    // set arithmetic: |union_{k<n} F_k^{-1} F_n| / |F_n|, max over n <= N
    double oracle_c = 0;
    for (std::size_t n = 2; n <= N; ++n) {
      std::set<std::int64_t> u;
      for (std::size_t k = 1; k < n; ++k)
        for (std::int64_t a = 0; a < static_cast<std::int64_t>(k); ++a)
          for (std::int64_t b = 0; b < static_cast<std::int64_t>(n); ++b) u.insert(b - a);
      oracle_c = std::max(oracle_c, static_cast<double>(u.size()) / static_cast<double>(n));
    }
    if (c.value() > 2 || std::abs(c.value() - oracle_c) > 1e-12) ok = false;
    worst = std::max(worst, c.value());
    if (N > 30) break;  // exhaustive oracle up to 30, closed form beyond
  }
  for (std::size_t N = 31; N <= 200; ++N) {
    const Rational c = tempered_prefix_constant(sched, N);
    const double closed = (2.0 * static_cast<double>(N) - 2) / static_cast<double>(N);
    if (c.value() > 2 || std::abs(c.value() - closed) > 1e-12) ok = false;
    worst = std::max(worst, c.value());
  }
  bool increasing = true;
  for (std::size_t n = 4; n <= 200; ++n)
    if (!(growth_margin(sched, n) > growth_margin(sched, n - 1))) increasing = false;
  return {ok && increasing,
          fmt("max constant over N <= 200 is %.4f (bound 2)", worst) +
              (increasing ? ", growth margin increasing for n > 3" : ", growth margin NOT increasing")};
}

Outcome c12_determinism() {
  using io::Json;
  const std::vector<Json> configs{
      {{"quantity", "packing_pressure"},
       {"shift", {{"kind", "golden_mean"}}},
       {"schedule", {{"kind", "boxes"}, {"d", 1}, {"count", 40}}},
       {"scale", {{"m", 1}, {"n_max", 30}}}},
      {{"quantity", "brin_katok"},
       {"measure", {{"kind", "bernoulli"}, {"p", 0.3}}},
       {"schedule", {{"kind", "boxes"}, {"d", 1}, {"count", 100}}},
       {"n", 100},
       {"seed", 5}},
      {{"quantity", "measure_upper_pressure"},
       {"measure", {{"kind", "bernoulli"}, {"p", 0.6}}},
       {"schedule", {{"kind", "boxes"}, {"d", 1}, {"count", 40}}},
       {"scale", {{"m", 1}, {"n_max", 40}}},
       {"samples", 50},
       {"seed", 8}},
      {{"quantity", "theorem12_check"},
       {"shift", {{"kind", "full"}, {"alphabet", 4}, {"d", 1}}},
       {"schedule", {{"kind", "boxes"}, {"d", 1}, {"count", 40}}},
       {"code", {{"kind", "one_block"}, {"target_alphabet", 2}, {"map", {0, 1, 0, 1}}}},
       {"scale", {{"m", 0}, {"n_max", 14}}},
       {"seed", 3}}};
  int bad = 0;
  for (const auto& c : configs) {
    const auto e = parse_experiment(c);
    const auto a = run_experiment(e, 1), b = run_experiment(e, 1), t = run_experiment(e, 4);
    if (a.report.dump(2) != b.report.dump(2) || a.report.dump(2) != t.report.dump(2) ||
        a.table_rows != b.table_rows || a.table_rows != t.table_rows)
      ++bad;
  }
  return {bad == 0, fmt("%g of 4 seeded configs differed across repeated runs (1 and 4 threads)", bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed-form pressure on full shifts", c1_closed_form},
      {"golden-mean entropy", c2_golden_mean},
      {"bowen <= packing <= upper capacity", c3_chain},
      {"constant-shift identity", c4_constant_shift},
      {"spanning/separated sandwich", c5_sandwich},
      {"variational principle on a Bernoulli grid", c6_variational},
      {"factor inequalities on the mod-2 collapse", c7_theorem12},
      {"restricted type-class sums", c8_lemma51},
      {"sampled Brin-Katok entropy", c9_brin_katok},
      {"5r covering selection", c10_vitali},
      {"temperedness and growth diagnostics", c11_folner},
      {"byte-identical reruns", c12_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
