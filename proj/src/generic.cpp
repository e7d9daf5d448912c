#include "packp/generic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "packp/classsum.hpp"

namespace packp {

namespace {

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

std::size_t pattern_code(const PeriodicPoint& x, const Site& g, const FiniteSubset& V, std::size_t k) {
  std::size_t code = 0;
  for (std::size_t i = V.size(); i-- > 0;) code = code * k + static_cast<std::size_t>(x.at(g + V[i]));
  return code;
}

bool within(const std::vector<double>& freq, const FrequencyNeighborhood& C) {
  for (std::size_t i = 0; i < freq.size(); ++i)
    if (std::abs(freq[i] - C.center[i]) > C.eta + 1e-12) return false;
  return true;
}

constexpr std::size_t kWitnessNodeBudget = 1u << 20;

}  // namespace

EmpiricalMeasure empirical_measure(const PeriodicPoint& x, int alphabet, const FiniteSubset& F,
                                   const FiniteSubset& V) {
  if (F.empty() || V.empty()) fail("generic/empty", "F and V must be nonempty");
  const auto k = static_cast<std::size_t>(alphabet);
  EmpiricalMeasure e;
  e.V = V;
  e.alphabet = alphabet;
  e.frequency.assign(ipow(k, V.size()), 0.0);
  for (const auto& g : F) e.frequency[pattern_code(x, g, V, k)] += 1.0;
  for (double& f : e.frequency) f /= static_cast<double>(F.size());
  return e;
}

FrequencyNeighborhood FrequencyNeighborhood::around(const Measure& mu, FiniteSubset V, double eta) {
  if (!(eta > 0)) fail("generic/eta", "eta must be positive");
  if (!V.contains(Site::zero(V.dim()))) fail("generic/window", "test window must contain the origin");
  FrequencyNeighborhood C;
  C.alphabet = alphabet_of(mu);
  C.eta = eta;
  const auto k = static_cast<std::size_t>(C.alphabet);
  C.center.assign(ipow(k, V.size()), 0.0);
  std::vector<Symbol> syms(V.size());
  for (std::size_t code = 0; code < C.center.size(); ++code) {
    std::size_t c = code;
    for (auto& a : syms) {
      a = static_cast<Symbol>(c % k);
      c /= k;
    }
    C.center[code] = cylinder_mass(mu, Pattern(V, syms));
  }
  C.V = std::move(V);
  return C;
}

bool FrequencyNeighborhood::contains(const EmpiricalMeasure& e) const {
  if (!(e.V == V) || e.alphabet != alphabet) fail("generic/window", "empirical measure uses another test window");
  return within(e.frequency, *this);
}

bool in_XFC(const PeriodicPoint& x, const FolnerSchedule& sched, std::size_t n, const FrequencyNeighborhood& C) {
  return C.contains(empirical_measure(x, C.alphabet, sched.at(n), C.V));
}

bool in_RNm(const PeriodicPoint& x, const FolnerSchedule& sched, std::size_t N, std::size_t n_max,
            const FrequencyNeighborhood& C) {
  if (N >= n_max) fail("generic/range", "need N < n_max");
  for (std::size_t n = N + 1; n <= n_max; ++n)
    if (!in_XFC(x, sched, n, C)) return false;
  return true;
}

// ---------------------------------------------------------------------------

namespace {

/// d = 1, interval F: scan the window left to right keeping the last R
/// symbols and the V-pattern counts seen so far.
double lemma51_chain(const System& sys, const FrequencyNeighborhood& C, const FiniteSubset& F, int m,
                     const LocalPotential& f) {
  const auto k = static_cast<std::size_t>(sys.shift.alphabet());
  const std::int64_t a = F[0][0] - m;
  const std::int64_t b = F[F.size() - 1][0] + m + 1;  // window [a, b)
  const auto span = [](const FiniteSubset& S) { return S.empty() ? 0 : S[S.size() - 1][0] - S[0][0]; };
  std::int64_t R = std::max(span(C.V), span(f.window()));
  for (const auto& w : sys.shift.forbidden()) R = std::max(R, span(w.support()));
  const std::size_t kR = ipow(k, static_cast<std::size_t>(R));
  const std::size_t ncodes = C.center.size();

  using Key = std::pair<std::size_t, std::vector<std::uint16_t>>;
  std::map<Key, double> cur, next;
  cur[{0, std::vector<std::uint16_t>(ncodes, 0)}] = 0.0;
  const auto digit = [&](std::size_t t, std::int64_t site, std::int64_t p) {
    return static_cast<Symbol>((t / ipow(k, static_cast<std::size_t>(site - (p - R)))) % k);
  };
  const std::int64_t vmax = C.V[C.V.size() - 1][0], wmax = f.window()[f.window().size() - 1][0];
  for (std::int64_t p = a; p < b; ++p) {
    next.clear();
    for (const auto& [key, val] : cur) {
      for (std::size_t s = 0; s < k; ++s) {
        const std::size_t t = key.first + s * kR;
        bool ok = true;
        for (const auto& w : sys.shift.forbidden()) {
          const std::int64_t shift = p - w.support()[w.size() - 1][0];
          if (w.support()[0][0] + shift < a) continue;
          bool match = true;
          for (std::size_t i = 0; i < w.size() && match; ++i)
            match = digit(t, w.support()[i][0] + shift, p) == w.symbols()[i];
          if (match) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        double v = val;
        const Site gf{p - wmax};
        if (F.contains(gf)) {
          std::size_t code = 0;
          for (std::size_t i = f.window().size(); i-- > 0;)
            code = code * k + static_cast<std::size_t>(digit(t, gf[0] + f.window()[i][0], p));
          v += f.rule()[code];
        }
        auto counts = key.second;
        const Site gv{p - vmax};
        if (F.contains(gv)) {
          std::size_t code = 0;
          for (std::size_t i = C.V.size(); i-- > 0;)
            code = code * k + static_cast<std::size_t>(digit(t, gv[0] + C.V[i][0], p));
          ++counts[code];
        }
        auto [it, fresh] = next.try_emplace({t / k, std::move(counts)}, v);
        if (!fresh) it->second = log_add(it->second, v);
      }
    }
    std::swap(cur, next);
  }
  double total = kNegInf;
  std::vector<double> freq(ncodes);
  for (const auto& [key, val] : cur) {
    for (std::size_t i = 0; i < ncodes; ++i) freq[i] = key.second[i] / static_cast<double>(F.size());
    if (within(freq, C)) total = log_add(total, val);
  }
  return total;
}

}  // namespace

Lemma51Result lemma51_sum(const System& sys, const FrequencyNeighborhood& C, std::size_t n, int m,
                          const LocalPotential& f) {
  if (m < 0) fail("generic/scale", "m must be non-negative");
  if (C.alphabet != sys.shift.alphabet() || f.alphabet() != sys.shift.alphabet())
    fail("generic/alphabet", "alphabets differ");
  const FiniteSubset& F = sys.schedule.at(n);
  const FiniteSubset Bm = FiniteSubset::ball(F.dim(), m);
  if (!C.V.is_subset_of(Bm)) fail("generic/window", "test window V must lie inside [-m,m]^d");
  Lemma51Result res;
  if (F.dim() == 1 && F.is_interval() && f.window().is_subset_of(Bm)) {
    res.log_sum = lemma51_chain(sys, C, F, m, f);
    res.route = "type-count scan";
  } else {
    ClassSumSpec spec(sys.shift, window_for_radius(F, m));
    spec.translates = F;
    spec.potential = &f;
    const auto k = static_cast<std::size_t>(C.alphabet);
    spec.predicate = [&](const Pattern& p) {
      std::vector<double> freq(C.center.size(), 0.0);
      for (const auto& g : F) {
        std::size_t code = 0;
        for (std::size_t i = C.V.size(); i-- > 0;) code = code * k + static_cast<std::size_t>(*p.at(g + C.V[i]));
        freq[code] += 1.0 / static_cast<double>(F.size());
      }
      return within(freq, C);
    };
    res.log_sum = log_class_sum(spec);
    res.route = "enumeration";
  }
  res.rate = res.log_sum / static_cast<double>(F.size());
  return res;
}

// ---------------------------------------------------------------------------

BrinKatokRecord brin_katok_local(const Measure& mu, const PeriodicPoint& x, const FolnerSchedule& sched, int m,
                                 std::size_t n_max, std::size_t tail) {
  if (tail == 0 || tail > n_max) fail("generic/tail", "need 1 <= tail <= n_max");
  BrinKatokRecord r;
  r.tail_max = -std::numeric_limits<double>::infinity();
  r.tail_min = std::numeric_limits<double>::infinity();
  for (std::size_t n = n_max - tail + 1; n <= n_max; ++n) {
    const FiniteSubset& F = sched.at(n);
    const double mass = ball_mass(mu, x, F, m, false);
    if (!(mass > 0)) fail("generic/zero_mass", "Bowen ball has zero mass; point outside the support");
    const double v = -std::log(mass) / static_cast<double>(F.size());
    r.series.push_back(v);
    r.tail_max = std::max(r.tail_max, v);
    r.tail_min = std::min(r.tail_min, v);
  }
  return r;
}

MonteCarloEstimate brin_katok_sampled(const Measure& mu, const FolnerSchedule& sched, std::size_t n, int m,
                                      std::size_t sample_count, std::uint64_t seed, unsigned threads) {
  if (sample_count == 0) fail("generic/samples", "sample_count must be positive");
  const int d = sched.dim();
  auto [lo, hi] = sched.at(n).bounds();
  std::int64_t extent = 0;
  for (int i = 0; i < d; ++i) extent = std::max(extent, hi[i] - lo[i] + 1);
  const auto L = static_cast<std::size_t>(extent + 2 * m + 1);
  MonteCarloEstimate est;
  est.samples.assign(sample_count, 0.0);
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = sample_rng(seed, i);
      const PeriodicPoint x = sample_point(mu, d, L, m, rng);
      est.samples[i] = brin_katok_local(mu, x, sched, m, n, 1).tail_max;
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(sample_count)));
  if (threads == 1) {
    work(0, sample_count);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (sample_count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = std::min(sample_count, t * chunk), e = std::min(sample_count, b + chunk);
      pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  const double N = static_cast<double>(sample_count);
  est.mean = std::accumulate(est.samples.begin(), est.samples.end(), 0.0) / N;
  double ss = 0;
  for (double v : est.samples) ss += (v - est.mean) * (v - est.mean);
  est.standard_error = sample_count > 1 ? std::sqrt(ss / (N - 1) / N) : 0.0;
  est.reference = entropy_of(mu);
  return est;
}

// ---------------------------------------------------------------------------

MistakeBallSpec::MistakeBallSpec(std::vector<double> eps_grid, std::vector<double> g_values)
    : eps_(std::move(eps_grid)), g_(std::move(g_values)) {
  if (eps_.empty() || eps_.size() != g_.size()) fail("generic/mistake", "grid and values must match and be nonempty");
  for (std::size_t i = 0; i < eps_.size(); ++i) {
    if (!(eps_[i] > 0 && eps_[i] < 1)) fail("generic/mistake", "grid radii must lie in (0,1)");
    if (!(g_[i] >= 0 && g_[i] < 1)) fail("generic/mistake", "mistake densities must lie in [0,1)");
    if (i > 0 && !(eps_[i] > eps_[i - 1])) fail("generic/mistake", "grid must be increasing");
    if (i > 0 && g_[i] < g_[i - 1]) fail("generic/mistake", "g must be non-decreasing");
  }
}

MistakeBallSpec MistakeBallSpec::constant(std::vector<double> eps_grid, double g) {
  std::vector<double> values(eps_grid.size(), g);
  return MistakeBallSpec(std::move(eps_grid), std::move(values));
}

double MistakeBallSpec::at(double eps) const {
  for (std::size_t i = 0; i < eps_.size(); ++i)
    if (std::abs(eps_[i] - eps) <= 1e-15 * eps_[i]) return g_[i];
  fail("generic/off_grid", "radius " + std::to_string(eps) + " is not on the mistake grid");
}

std::size_t mistake_count(const FiniteSubset& F, const PeriodicPoint& x, const PeriodicPoint& y, double eps) {
  const std::int64_t r = window_radius(eps, true);
  if (r < 0) return 0;
  const FiniteSubset B = FiniteSubset::ball(x.dim(), r);
  std::size_t bad = 0;
  for (const auto& h : F)
    for (const auto& b : B)
      if (x.at(h + b) != y.at(h + b)) {
        ++bad;
        break;
      }
  return bad;
}

bool mistake_ball_membership(const MistakeBallSpec& spec, const FiniteSubset& F, const PeriodicPoint& x,
                             const PeriodicPoint& y, double eps) {
  const double g = spec.at(eps);
  return static_cast<double>(mistake_count(F, x, y, eps)) <= g * static_cast<double>(F.size()) * (1 + 1e-12);
}

// ---------------------------------------------------------------------------

namespace {

struct Draft {
  Site period;
  Site origin;  // lower corner of the fundamental box
  std::vector<Symbol> cells;
  std::vector<bool> copied;
};

std::size_t cell_index(const Draft& d, const Site& h) {
  std::size_t idx = 0;
  for (int i = 0; i < d.period.dim; ++i) {
    const std::int64_t p = d.period[i];
    idx = idx * static_cast<std::size_t>(p) + static_cast<std::size_t>(((h[i] - d.origin[i]) % p + p) % p);
  }
  return idx;
}

PeriodicPoint realise(const Draft& d) {
  // PeriodicPoint stores [0,p)^d; rotate so the draft origin lands correctly.
  std::vector<Symbol> cells(d.cells.size());
  Site h(d.period.dim);
  std::size_t j = 0;
  std::vector<std::int64_t> c(static_cast<std::size_t>(d.period.dim), 0);
  while (true) {
    for (int i = 0; i < d.period.dim; ++i) h[i] = c[static_cast<std::size_t>(i)];
    cells[j++] = d.cells[cell_index(d, h)];
    int i = d.period.dim - 1;
    while (i >= 0 && ++c[static_cast<std::size_t>(i)] == d.period[i]) {
      c[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return PeriodicPoint(d.period, std::move(cells));
}

bool verified(const std::vector<OrbitSegment>& segs, const MistakeBallSpec& spec, const PeriodicPoint& w) {
  for (const auto& s : segs)
    if (!mistake_ball_membership(spec, s.F, s.x, w, s.eps)) return false;
  return true;
}

/// Cyclic d = 1 repair: depth-first over the period, copied symbols first.
std::optional<PeriodicPoint> repair_line(const Subshift& X, const Draft& d, const std::vector<OrbitSegment>& segs,
                                         const MistakeBallSpec& spec) {
  const auto L = static_cast<std::size_t>(d.period[0]);
  const int k = X.alphabet();
  std::vector<Symbol> cur(L);
  std::size_t nodes = 0;
  std::optional<PeriodicPoint> found;
  const auto violates_at = [&](std::size_t i, bool closing) {
    for (const auto& w : X.forbidden()) {
      const std::int64_t len = w.support()[w.size() - 1][0] - w.support()[0][0] + 1;
      // words ending at position i; wrap only when closing the cycle
      const std::int64_t start = static_cast<std::int64_t>(i) - len + 1;
      if (start < 0 && !closing) continue;
      bool match = true;
      for (std::size_t j = 0; j < w.size() && match; ++j) {
        const std::int64_t pos = start + (w.support()[j][0] - w.support()[0][0]);
        const auto q = static_cast<std::size_t>((pos % static_cast<std::int64_t>(L) + static_cast<std::int64_t>(L)) %
                                                static_cast<std::int64_t>(L));
        match = cur[q] == w.symbols()[j];
      }
      if (match) return true;
    }
    return false;
  };
  const std::function<bool(std::size_t)> dfs = [&](std::size_t i) -> bool {
    if (++nodes > kWitnessNodeBudget) return true;  // give up
    if (i == L) {
      for (std::size_t j = 0; j < L; ++j)
        if (violates_at(j, true)) return false;
      Draft t = d;
      t.cells = cur;
      PeriodicPoint w = realise(t);
      if (verified(segs, spec, w)) {
        found = std::move(w);
        return true;
      }
      return false;
    }
    std::vector<Symbol> order{d.cells[i]};
    for (Symbol a = 0; a < k; ++a)
      if (a != d.cells[i]) order.push_back(a);
    for (Symbol a : order) {
      cur[i] = a;
      if (violates_at(i, false)) continue;
      if (dfs(i + 1)) return true;
    }
    return false;
  };
  dfs(0);
  return found;
}

}  // namespace

std::optional<PeriodicPoint> almost_spec_witness(const Subshift& X, const std::vector<OrbitSegment>& segments,
                                                 const MistakeBallSpec& spec) {
  if (segments.empty()) fail("generic/segments", "need at least one orbit segment");
  const int d = X.dim();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].F.empty() || segments[i].F.dim() != d) fail("generic/segments", "segment sets must be nonempty and of the shift's dimension");
    spec.at(segments[i].eps);
    for (std::size_t j = i + 1; j < segments.size(); ++j)
      if (!segments[i].F.intersect(segments[j].F).empty()) fail("generic/overlap", "segment sets must be pairwise disjoint");
  }
  // copy each x_i on its closed ball window
  std::vector<FiniteSubset> windows;
  FiniteSubset all;
  for (const auto& s : segments) {
    windows.push_back(window_for_radius(s.F, window_radius(s.eps, true)));
    all = all.unite(windows.back()).unite(s.F);
  }
  const auto [lo, hi] = all.bounds();
  Draft draft;
  draft.period = Site(d);
  draft.origin = lo;
  std::size_t cells = 1;
  for (int i = 0; i < d; ++i) {
    // one spare cell keeps the two ends of the window from touching in d = 1
    draft.period[i] = hi[i] - lo[i] + 1 + (d == 1 ? 1 : 0);
    cells *= static_cast<std::size_t>(draft.period[i]);
  }
  if (cells > (std::size_t{1} << 22)) fail_resource("generic/budget", "witness box too large");
  draft.cells.assign(cells, 0);
  draft.copied.assign(cells, false);
  for (std::size_t i = 0; i < segments.size(); ++i)
    for (const auto& h : windows[i]) {
      const auto idx = cell_index(draft, h);
      if (draft.copied[idx]) continue;  // collision: first segment keeps the site
      draft.cells[idx] = segments[i].x.at(h);
      draft.copied[idx] = true;
    }
  PeriodicPoint w = realise(draft);
  if (w.admissible_in(X) && verified(segments, spec, w)) return w;
  if (X.is_full()) return std::nullopt;
  if (d == 1) return repair_line(X, draft, segments, spec);
  return std::nullopt;
}

}  // namespace packp
