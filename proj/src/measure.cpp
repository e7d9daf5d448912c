#include "packp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <thread>

#include "packp/classsum.hpp"

namespace packp {

namespace {

double plogp(double p) { return p > 0 ? p * std::log(p) : 0.0; }

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& P, std::int64_t e) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(P.rows(), P.cols());
  Eigen::MatrixXd b = P;
  while (e > 0) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

bool irreducible(const Eigen::MatrixXd& P) {
  const auto k = P.rows();
  for (Eigen::Index s = 0; s < k; ++s) {
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    std::queue<Eigen::Index> q;
    q.push(s);
    seen[static_cast<std::size_t>(s)] = true;
    while (!q.empty()) {
      const auto a = q.front();
      q.pop();
      for (Eigen::Index b = 0; b < k; ++b)
        if (P(a, b) > 0 && !seen[static_cast<std::size_t>(b)]) {
          seen[static_cast<std::size_t>(b)] = true;
          q.push(b);
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) return false;
  }
  return true;
}

std::size_t draw(const double* w, std::size_t k, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0;
  for (std::size_t a = 0; a + 1 < k; ++a) {
    acc += w[a];
    if (u < acc) return a;
  }
  return k - 1;
}

}  // namespace

ProductMeasure::ProductMeasure(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.size() < 2) fail("measure/weights", "need at least two symbols");
  double s = 0;
  for (double w : w_) {
    if (!(w >= 0)) fail("measure/weights", "weights must be non-negative");
    s += w;
  }
  if (std::abs(s - 1) > 1e-12) fail("measure/weights", "weights must sum to 1");
}

double ProductMeasure::entropy() const {
  double h = 0;
  for (double w : w_) h -= plogp(w);
  return h;
}

MarkovMeasure::MarkovMeasure(Eigen::MatrixXd transition) : P_(std::move(transition)) {
  const auto k = P_.rows();
  if (k < 2 || P_.cols() != k) fail("measure/markov", "transition matrix must be square with k >= 2");
  if ((P_.array() < 0).any()) fail("measure/markov", "negative transition probability");
  for (Eigen::Index i = 0; i < k; ++i)
    if (std::abs(P_.row(i).sum() - 1) > 1e-12) fail("measure/markov", "rows must sum to 1");
  if (!irreducible(P_)) fail("measure/markov", "transition matrix is not irreducible");
  // pi (P - I) = 0 with sum pi = 1
  Eigen::MatrixXd A = P_.transpose() - Eigen::MatrixXd::Identity(k, k);
  A.row(k - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  b(k - 1) = 1;
  pi_ = A.fullPivLu().solve(b);
  if (((pi_.transpose() * P_) - pi_.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    fail("measure/markov", "stationary vector did not converge");
}

double MarkovMeasure::entropy() const {
  double h = 0;
  for (Eigen::Index i = 0; i < P_.rows(); ++i)
    for (Eigen::Index j = 0; j < P_.cols(); ++j) h -= pi_(i) * plogp(P_(i, j));
  return h;
}

int alphabet_of(const Measure& mu) {
  return std::visit([](const auto& m) { return m.alphabet(); }, mu);
}

double entropy_of(const Measure& mu) {
  return std::visit([](const auto& m) { return m.entropy(); }, mu);
}

double cylinder_mass(const Measure& mu, const Pattern& pattern) {
  if (pattern.size() == 0) return 1.0;
  const int k = alphabet_of(mu);
  for (Symbol a : pattern.symbols())
    if (a < 0 || a >= k) fail("measure/symbol", "pattern symbol outside alphabet");
  if (const auto* prod = std::get_if<ProductMeasure>(&mu)) {
    double m = 1;
    for (Symbol a : pattern.symbols()) m *= prod->weights()[static_cast<std::size_t>(a)];
    return m;
  }
  const auto& mk = std::get<MarkovMeasure>(mu);
  if (pattern.dim() != 1) fail("measure/dimension", "Markov measures live on Z");
  const auto& P = mk.transition();
  const auto sym = pattern.symbols();
  double m = mk.stationary()(sym[0]);
  for (std::size_t i = 1; i < pattern.size(); ++i) {
    const std::int64_t gap = pattern.support()[i][0] - pattern.support()[i - 1][0];
    m *= gap == 1 ? P(sym[i - 1], sym[i]) : matrix_power(P, gap)(sym[i - 1], sym[i]);
  }
  return m;
}

double expectation(const Measure& mu, const LocalPotential& f) {
  const auto k = static_cast<std::size_t>(f.alphabet());
  const auto rule = f.rule();
  std::vector<Symbol> syms(f.window().size());
  double e = 0;
  for (std::size_t code = 0; code < rule.size(); ++code) {
    std::size_t c = code;
    for (auto& a : syms) {
      a = static_cast<Symbol>(c % k);
      c /= k;
    }
    e += cylinder_mass(mu, Pattern(f.window(), syms)) * rule[code];
  }
  return e;
}

double ball_mass(const Measure& mu, const PeriodicPoint& x, const FiniteSubset& F, int m, bool closed) {
  if (m < 0) fail("measure/scale", "m must be non-negative");
  const std::int64_t r = closed ? m - 1 : m;
  return cylinder_mass(mu, x.pattern_on(window_for_radius(F, r)));
}

LocalPressureSample local_pressure(const Measure& mu, const LocalPotential& f, const PeriodicPoint& x,
                                   const FolnerSchedule& sched, std::size_t n, int m) {
  const FiniteSubset& F = sched.at(n);
  const double mass = ball_mass(mu, x, F, m, false);
  if (!(mass > 0)) fail("measure/zero_mass", "Bowen ball has zero mass; point outside the support");
  return {n, m, (-std::log(mass) + potential_sum(f, x, F)) / static_cast<double>(F.size())};
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

PeriodicPoint sample_point(const Measure& mu, int d, std::size_t L, int m, std::mt19937_64& rng) {
  if (L == 0) fail("measure/sample", "period must be positive");
  const auto k = static_cast<std::size_t>(alphabet_of(mu));
  if (d == 2) {
    const auto* prod = std::get_if<ProductMeasure>(&mu);
    if (!prod) fail("measure/dimension", "Markov measures live on Z");
    std::vector<Symbol> cells(L * L);
    for (auto& a : cells) a = static_cast<Symbol>(draw(prod->weights().data(), k, rng));
    const auto l = static_cast<std::int64_t>(L);
    return PeriodicPoint(Site{l, l}, std::move(cells));
  }
  if (d != 1) fail("measure/dimension", "sampling supports d = 1, 2");
  std::vector<Symbol> w(L);  // w[i] = x_{i - m}
  if (const auto* prod = std::get_if<ProductMeasure>(&mu)) {
    for (auto& a : w) a = static_cast<Symbol>(draw(prod->weights().data(), k, rng));
  } else {
    const auto& mk = std::get<MarkovMeasure>(mu);
    const Eigen::VectorXd pi = mk.stationary();
    const Eigen::MatrixXd& P = mk.transition();
    std::vector<double> row(k);
    w[0] = static_cast<Symbol>(draw(pi.data(), k, rng));
    for (std::size_t i = 1; i < L; ++i) {
      for (std::size_t b = 0; b < k; ++b) row[b] = P(w[i - 1], static_cast<Eigen::Index>(b));
      w[i] = static_cast<Symbol>(draw(row.data(), k, rng));
    }
  }
  std::vector<Symbol> cells(L);
  for (std::size_t j = 0; j < L; ++j) cells[j] = w[(j + static_cast<std::size_t>(m)) % L];
  return PeriodicPoint::word(std::move(cells));
}

MonteCarloEstimate measure_upper_pressure(const Measure& mu, const LocalPotential& f, const FolnerSchedule& sched,
                                          const TailParams& p) {
  if (p.sample_count == 0) fail("measure/samples", "sample_count must be positive");
  if (p.tail == 0 || p.tail > p.n_max) fail("measure/tail", "need 1 <= tail <= n_max");
  const int d = sched.dim();
  // enough room that no ball window wraps around the period
  auto [lo, hi] = sched.at(p.n_max).bounds();
  std::int64_t extent = 0;
  for (int i = 0; i < d; ++i) extent = std::max(extent, hi[i] - lo[i] + 1);
  const auto L = static_cast<std::size_t>(extent + 2 * p.m + 1);

  MonteCarloEstimate est;
  est.samples.assign(p.sample_count, 0.0);
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = sample_rng(p.seed, i);
      const PeriodicPoint x = sample_point(mu, d, L, p.m, rng);
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t n = p.n_max - p.tail + 1; n <= p.n_max; ++n)
        best = std::max(best, local_pressure(mu, f, x, sched, n, p.m).value);
      est.samples[i] = best;
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(p.threads, static_cast<unsigned>(p.sample_count)));
  if (threads == 1) {
    work(0, p.sample_count);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (p.sample_count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = std::min(p.sample_count, t * chunk), e = std::min(p.sample_count, b + chunk);
      pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  const double n = static_cast<double>(p.sample_count);
  est.mean = std::accumulate(est.samples.begin(), est.samples.end(), 0.0) / n;
  double ss = 0;
  for (double v : est.samples) ss += (v - est.mean) * (v - est.mean);
  est.standard_error = p.sample_count > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  est.reference = entropy_of(mu) + expectation(mu, f);
  return est;
}

TypicalSet typical_cylinders(const Measure& mu, const Subshift& X, int depth, double delta) {
  if (!(delta > 0 && delta < 1)) fail("measure/delta", "delta must lie in (0,1)");
  if (depth < 0) fail("measure/depth", "depth must be non-negative");
  if (alphabet_of(mu) != X.alphabet()) fail("measure/alphabet", "measure alphabet differs from subshift");
  const FiniteSubset S = FiniteSubset::box(X.dim(), depth);
  const auto k = static_cast<std::size_t>(X.alphabet());
  std::size_t total = 1;
  for (std::size_t i = 0; i < S.size(); ++i) {
    total *= k;
    if (total > (std::size_t{1} << 16)) fail_resource("measure/budget", "too many depth cylinders");
  }
  struct Entry {
    double mass;
    std::size_t code;
  };
  std::vector<Entry> entries;
  std::vector<Symbol> syms(S.size());
  const auto decode = [&](std::size_t code) {
    for (auto& a : syms) {
      a = static_cast<Symbol>(code % k);
      code /= k;
    }
    return Pattern(S, syms);
  };
  for (std::size_t code = 0; code < total; ++code) {
    const Pattern p = decode(code);
    if (!X.admissible(p)) continue;
    const double m = cylinder_mass(mu, p);
    if (m > 0) entries.push_back({m, code});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.mass > b.mass; });
  TypicalSet t;
  for (const auto& e : entries) {
    if (t.mass >= 1 - delta - 1e-12) break;
    t.cylinders.push_back(decode(e.code));
    t.mass += e.mass;
  }
  return t;
}

MeasurePackingEstimate measure_packing_pressure(const System& sys, const Measure& mu, const LocalPotential& f,
                                                double delta, int cylinder_depth, const ScaleParams& params) {
  MeasurePackingEstimate out;
  out.typical = typical_cylinders(mu, sys.shift, cylinder_depth, delta);
  out.estimate = packing_pressure(sys, SubsetSpec::cylinder_union(out.typical.cylinders), f, params);
  out.estimate.quantity = "measure_packing_pressure";
  out.estimate.restriction += ", Z = " + std::to_string(out.typical.cylinders.size()) +
                              " highest-mass depth-" + std::to_string(cylinder_depth) + " cylinders";
  return out;
}

MeasurePackingEstimate katok_packing_pressure(const System& sys, const Measure& mu, const LocalPotential& f,
                                              double delta, int cylinder_depth, const ScaleParams& params) {
  MeasurePackingEstimate out;
  out.typical = typical_cylinders(mu, sys.shift, cylinder_depth, delta);
  std::vector<SubsetSpec> pieces;
  for (const auto& c : out.typical.cylinders) pieces.push_back(SubsetSpec::cylinder_union({c}));
  out.estimate = packing_pressure_pieces(sys, pieces, f, params);
  out.estimate.quantity = "katok_packing_pressure";
  out.estimate.restriction += ", covers by the highest-mass depth-" + std::to_string(cylinder_depth) + " cylinders";
  return out;
}

}  // namespace packp
