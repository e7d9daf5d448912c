#include "packp/factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "packp/classsum.hpp"
#include "packp/measure.hpp"

namespace packp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kExhaustiveTargets = 4096;
constexpr std::size_t kSampledTargets = 256;
constexpr std::size_t kDfaStateCap = std::size_t{1} << 18;

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

bool pow_exceeds(std::size_t b, std::size_t e, std::size_t limit) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    r *= b;
    if (r > limit) return true;
  }
  return false;
}

std::int64_t span1(const FiniteSubset& S) { return S.empty() ? 0 : S[S.size() - 1][0] - S[0][0]; }

/// y pattern on Y-sites from a source pattern; every h + W must be covered.
std::vector<Symbol> push_forward(const SlidingBlockCode& code, const Pattern& x, const FiniteSubset& Y) {
  std::vector<Symbol> out;
  out.reserve(Y.size());
  std::vector<Symbol> loc(code.window().size());
  for (const auto& h : Y) {
    for (std::size_t i = 0; i < loc.size(); ++i) {
      const auto v = x.at(h + code.window()[i]);
      if (!v) fail("factor/window", "source pattern does not cover the code window");
      loc[i] = *v;
    }
    out.push_back(code.image_at(loc));
  }
  return out;
}

double ergodic_sum_on(const LocalPotential& f, const FiniteSubset& F, const FiniteSubset& Y,
                      const std::vector<Symbol>& y) {
  double s = 0;
  std::vector<Symbol> loc(f.window().size());
  for (const auto& g : F) {
    for (std::size_t i = 0; i < loc.size(); ++i) loc[i] = y[static_cast<std::size_t>(Y.index_of(g + f.window()[i]))];
    s += f.of_pattern(loc);
  }
  return s;
}

bool forbidden_ends_at(const Subshift& X, std::int64_t p, std::int64_t lo, std::int64_t R, std::size_t k,
                       std::size_t t) {
  for (const auto& w : X.forbidden()) {
    const std::int64_t shift = p - w.support()[w.size() - 1][0];
    if (w.support()[0][0] + shift < lo) continue;
    bool match = true;
    for (std::size_t i = 0; i < w.size() && match; ++i) {
      const auto e = static_cast<std::size_t>(w.support()[i][0] + shift - (p - R));
      match = static_cast<Symbol>((t / ipow(k, e)) % k) == w.symbols()[i];
    }
    if (match) return true;
  }
  return false;
}

/// d = 1: determinised scan over source positions; each surviving key is one
/// distinct image prefix together with the source states that can produce it.
double image_sum_chain(const SlidingBlockCode& code, const SubsetSpec& E, const FiniteSubset& F, int m,
                       const LocalPotential& f) {
  const Subshift& X = code.source();
  const auto k = static_cast<std::size_t>(X.alphabet());
  const auto ky = static_cast<std::size_t>(code.target_alphabet());
  const std::int64_t a = F[0][0] - m, b = F[F.size() - 1][0] + m + 1;
  const std::int64_t wl = code.window()[0][0], wr = code.window()[code.window().size() - 1][0];
  std::int64_t lo = a + wl, hi = b - 1 + wr;
  for (const auto& c : E.cylinders) {
    lo = std::min(lo, c.support()[0][0]);
    hi = std::max(hi, c.support()[c.size() - 1][0]);
  }
  std::int64_t R = span1(code.window());
  for (const auto& w : X.forbidden()) R = std::max(R, span1(w.support()));
  const std::size_t kR = ipow(k, static_cast<std::size_t>(R));
  const std::int64_t Rf = span1(f.window());
  const std::size_t kyRf = ipow(ky, static_cast<std::size_t>(Rf));
  const std::int64_t fmax = f.window()[f.window().size() - 1][0];
  const bool has_cyl = !E.cylinders.empty();
  const std::uint64_t full_mask =
      has_cyl ? (E.cylinders.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << E.cylinders.size()) - 1) : 1;

  using Nfa = std::pair<std::size_t, std::uint64_t>;
  using Key = std::pair<std::size_t, std::vector<Nfa>>;
  std::map<Key, double> cur, next;
  cur[{0, {{0, full_mask}}}] = 0.0;
  std::map<std::size_t, std::set<Nfa>> by_symbol;
  std::vector<Symbol> loc(code.window().size());
  for (std::int64_t p = lo; p <= hi; ++p) {
    const std::int64_t h = p - wr;
    const bool emits = h >= a && h < b;
    next.clear();
    for (const auto& [key, val] : cur) {
      by_symbol.clear();
      for (const auto& [state, mask0] : key.second) {
        for (std::size_t s = 0; s < k; ++s) {
          const std::size_t t = state + s * kR;
          if (forbidden_ends_at(X, p, lo, R, k, t)) continue;
          std::uint64_t mask = mask0;
          if (has_cyl) {
            for (std::size_t i = 0; i < E.cylinders.size(); ++i) {
              if (!(mask >> i & 1)) continue;
              const auto v = E.cylinders[i].at(Site{p});
              if (v && *v != static_cast<Symbol>(s)) mask &= ~(std::uint64_t{1} << i);
            }
            if (mask == 0) continue;
          }
          std::size_t y = 0;
          if (emits) {
            for (std::size_t i = 0; i < loc.size(); ++i) {
              const auto e = static_cast<std::size_t>(h + code.window()[i][0] - (p - R));
              loc[i] = static_cast<Symbol>((t / ipow(k, e)) % k);
            }
            y = static_cast<std::size_t>(code.image_at(loc));
          }
          by_symbol[y].insert({t / k, mask});
        }
      }
      for (auto& [y, states] : by_symbol) {
        double v = val;
        std::size_t ycode = key.first;
        if (emits) {
          const std::size_t yt = key.first + y * kyRf;
          const std::int64_t g = h - fmax;
          if (F.contains(Site{g})) {
            std::size_t c = 0;
            for (std::size_t i = f.window().size(); i-- > 0;) {
              const auto e = static_cast<std::size_t>(g + f.window()[i][0] - (h - Rf));
              c = c * ky + (yt / ipow(ky, e)) % ky;
            }
            v += f.rule()[c];
          }
          ycode = yt / ky;
        }
        auto [it, fresh] = next.try_emplace({ycode, std::vector<Nfa>(states.begin(), states.end())}, v);
        if (!fresh) it->second = log_add(it->second, v);
      }
    }
    if (next.size() > kDfaStateCap) fail_resource("factor/budget", "image automaton exceeds state budget");
    std::swap(cur, next);
  }
  double total = -kInf;
  for (const auto& [key, val] : cur) total = log_add(total, val);
  return total;
}

double image_sum_brute(const SlidingBlockCode& code, const SubsetSpec& E, const FiniteSubset& F, int m,
                       const LocalPotential& f) {
  const FiniteSubset Y = window_for_radius(F, m);
  ClassSumSpec spec(code.source(), Y.sum(code.window()));
  spec.cylinders = E.cylinders;
  std::set<std::vector<Symbol>> images;
  for (const auto& c : enumerate_classes(spec)) images.insert(push_forward(code, c.pattern, Y));
  double total = -kInf;
  for (const auto& y : images) total = log_add(total, ergodic_sum_on(f, F, Y, y));
  return total;
}

std::vector<SeriesPoint> image_series(const SlidingBlockCode& code, const FolnerSchedule& sched, const SubsetSpec& E,
                                      const LocalPotential& f, const ScaleParams& p) {
  p.validate();
  std::vector<SeriesPoint> out;
  for (std::size_t n = std::min(p.n_min, p.n_max - p.tail); n <= p.n_max; ++n) {
    const double L = log_image_separated_sum(code, sched, E, p.m, n, f);
    if (L == -kInf) fail("factor/empty", "pi(E) has no pattern on the window of F_" + std::to_string(n));
    out.push_back({n, sched.at(n).size(), L});
  }
  return out;
}

/// Random admissible source word on [lo, hi) for d = 1, by forward choice with restarts.
std::optional<std::vector<Symbol>> random_word(const Subshift& X, std::int64_t lo, std::int64_t hi,
                                               std::mt19937_64& rng) {
  const auto k = static_cast<std::size_t>(X.alphabet());
  std::int64_t R = 0;
  for (const auto& w : X.forbidden()) R = std::max(R, span1(w.support()));
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<Symbol> w;
    bool dead = false;
    for (std::int64_t p = lo; p < hi && !dead; ++p) {
      std::vector<Symbol> ok;
      for (std::size_t s = 0; s < k; ++s) {
        std::size_t t = s * ipow(k, static_cast<std::size_t>(R));
        for (std::int64_t j = 1; j <= R; ++j) {
          const std::int64_t q = p - j;
          if (q >= lo) t += static_cast<std::size_t>(w[static_cast<std::size_t>(q - lo)]) * ipow(k, static_cast<std::size_t>(R - j));
        }
        if (!forbidden_ends_at(X, p, lo, R, k, t)) ok.push_back(static_cast<Symbol>(s));
      }
      if (ok.empty()) dead = true;
      else w.push_back(ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)]);
    }
    if (!dead) return w;
  }
  return std::nullopt;
}

std::vector<Pattern> fiber_targets(const SlidingBlockCode& code, const FiniteSubset& F, std::uint64_t seed,
                                   std::size_t n, bool& sampled) {
  const auto ky = static_cast<std::size_t>(code.target_alphabet());
  std::vector<Pattern> out;
  if (!pow_exceeds(ky, F.size(), kExhaustiveTargets)) {
    sampled = false;
    const std::size_t total = ipow(ky, F.size());
    std::vector<Symbol> syms(F.size());
    for (std::size_t c = 0; c < total; ++c) {
      std::size_t t = c;
      for (auto& s : syms) {
        s = static_cast<Symbol>(t % ky);
        t /= ky;
      }
      out.emplace_back(F, syms);
    }
    return out;
  }
  sampled = true;
  const Subshift& X = code.source();
  if (X.dim() != 1 || !F.is_interval()) fail_resource("factor/budget", "target sampling needs an interval in d = 1");
  const FiniteSubset U = F.sum(code.window());
  const std::int64_t lo = U[0][0], hi = U[U.size() - 1][0] + 1;
  for (std::size_t i = 0; i < kSampledTargets; ++i) {
    auto rng = sample_rng(seed ^ (0x9e3779b97f4a7c15ULL * n), i);
    const auto w = random_word(X, lo, hi, rng);
    if (!w) fail("factor/sampling", "could not draw an admissible source word");
    std::vector<Site> sites;
    for (std::int64_t p = lo; p < hi; ++p) sites.push_back(Site{p});
    const Pattern x(FiniteSubset(std::move(sites)), *w);
    out.emplace_back(F, push_forward(code, x, F));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

SlidingBlockCode::SlidingBlockCode(Subshift source, int target_alphabet, FiniteSubset window, std::vector<Symbol> rule)
    : source_(std::move(source)), ky_(Alphabet(target_alphabet).size), window_(std::move(window)), rule_(std::move(rule)) {
  if (window_.empty() || window_.dim() != source_.dim()) fail("factor/window", "code window must be nonempty and match the source dimension");
  if (rule_.size() != ipow(static_cast<std::size_t>(source_.alphabet()), window_.size()))
    fail("factor/rule", "rule table must have k^|W| entries");
  for (Symbol s : rule_)
    if (s < 0 || s >= ky_) fail("factor/rule", "rule symbol outside target alphabet");
}

SlidingBlockCode SlidingBlockCode::identity(Subshift source) {
  const int k = source.alphabet();
  std::vector<Symbol> rule(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) rule[static_cast<std::size_t>(a)] = static_cast<Symbol>(a);
  const int d = source.dim();
  return SlidingBlockCode(std::move(source), k, FiniteSubset::ball(d, 0), std::move(rule));
}

SlidingBlockCode SlidingBlockCode::one_block(Subshift source, int target_alphabet, std::vector<Symbol> map) {
  const int d = source.dim();
  return SlidingBlockCode(std::move(source), target_alphabet, FiniteSubset::ball(d, 0), std::move(map));
}

SlidingBlockCode SlidingBlockCode::constant(Subshift source, Symbol value) {
  const auto k = static_cast<std::size_t>(source.alphabet());
  const int d = source.dim();
  return SlidingBlockCode(std::move(source), std::max(2, value + 1), FiniteSubset::ball(d, 0), std::vector<Symbol>(k, value));
}

SlidingBlockCode SlidingBlockCode::from_function(Subshift source, int target_alphabet, FiniteSubset window,
                                                 const std::function<Symbol(std::span<const Symbol>)>& fn) {
  const auto k = static_cast<std::size_t>(source.alphabet());
  const std::size_t total = ipow(k, window.size());
  std::vector<Symbol> rule(total), loc(window.size());
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t t = c;
    for (auto& s : loc) {
      s = static_cast<Symbol>(t % k);
      t /= k;
    }
    rule[c] = fn(loc);
  }
  return SlidingBlockCode(std::move(source), target_alphabet, std::move(window), std::move(rule));
}

std::int64_t SlidingBlockCode::radius() const {
  std::int64_t r = 0;
  for (const auto& w : window_) r = std::max(r, w.norm_inf());
  return r;
}

Symbol SlidingBlockCode::image_at(std::span<const Symbol> window_symbols) const {
  std::size_t c = 0;
  const auto k = static_cast<std::size_t>(source_.alphabet());
  for (std::size_t i = window_symbols.size(); i-- > 0;) c = c * k + static_cast<std::size_t>(window_symbols[i]);
  return rule_[c];
}

PeriodicPoint apply_code(const SlidingBlockCode& code, const PeriodicPoint& x) {
  if (x.dim() != code.source().dim()) fail("factor/dimension", "point dimension differs from the code");
  const FiniteSubset box = [&] {
    std::vector<Site> sites;
    const Site& p = x.period();
    std::vector<std::int64_t> c(static_cast<std::size_t>(p.dim), 0);
    while (true) {
      Site h(p.dim);
      for (int i = 0; i < p.dim; ++i) h[i] = c[static_cast<std::size_t>(i)];
      sites.push_back(h);
      int i = p.dim - 1;
      while (i >= 0 && ++c[static_cast<std::size_t>(i)] == p[i]) c[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
    }
    return FiniteSubset(std::move(sites));
  }();
  std::vector<Symbol> cells;
  cells.reserve(box.size());
  std::vector<Symbol> loc(code.window().size());
  for (const auto& h : box) {
    for (std::size_t i = 0; i < loc.size(); ++i) loc[i] = x.at(h + code.window()[i]);
    cells.push_back(code.image_at(loc));
  }
  return PeriodicPoint(x.period(), std::move(cells));
}

Pattern apply_code(const SlidingBlockCode& code, const Pattern& p) {
  std::vector<Site> sites;
  for (const auto& h : p.support()) {
    bool inside = true;
    for (const auto& w : code.window()) inside = inside && p.at(h + w).has_value();
    if (inside) sites.push_back(h);
  }
  const FiniteSubset Y(std::move(sites));
  return Pattern(Y, push_forward(code, p, Y));
}

LocalPotential compose(const LocalPotential& f, const SlidingBlockCode& code) {
  if (f.alphabet() != code.target_alphabet()) fail("factor/alphabet", "potential alphabet differs from code target");
  const int d = code.source().dim();
  const FiniteSubset U = f.window().sum(code.window()).unite(FiniteSubset::ball(d, 0));
  return LocalPotential::from_function(code.source().alphabet(), U, [&](std::span<const Symbol> s) {
    const Pattern x(U, std::vector<Symbol>(s.begin(), s.end()));
    return f.of_pattern(push_forward(code, x, f.window()));
  });
}

double log_image_separated_sum(const SlidingBlockCode& code, const FolnerSchedule& sched, const SubsetSpec& E,
                               int m, std::size_t n, const LocalPotential& f) {
  if (m < 0) fail("factor/scale", "m must be non-negative");
  if (f.alphabet() != code.target_alphabet()) fail("factor/alphabet", "potential alphabet differs from code target");
  if (sched.dim() != code.source().dim()) fail("factor/dimension", "schedule and code dimensions differ");
  if (!f.window().is_subset_of(FiniteSubset::ball(sched.dim(), m)))
    fail("factor/window", "target potential window must lie inside [-m,m]^d");
  const FiniteSubset& F = sched.at(n);
  if (E.kind == SubsetSpec::Kind::point) {
    if (!E.point->admissible_in(code.source())) fail("factor/point", "point is not in the source subshift");
    return potential_sum(f, apply_code(code, *E.point), F);
  }
  if (F.dim() == 1 && F.is_interval() && E.cylinders.size() <= 64) {
    bool cyl_1d = true;
    for (const auto& c : E.cylinders) cyl_1d = cyl_1d && c.dim() == 1;
    if (cyl_1d) return image_sum_chain(code, E, F, m, f);
  }
  return image_sum_brute(code, E, F, m, f);
}

PressureEstimate image_pressure(const SlidingBlockCode& code, const FolnerSchedule& sched, const SubsetSpec& E,
                                const LocalPotential& f, const ScaleParams& params) {
  PressureEstimate e = packing_from_series(image_series(code, sched, E, f, params), params);
  e.quantity = "image_packing_pressure";
  return e;
}

// ---------------------------------------------------------------------------

double log_fiber_count(const SlidingBlockCode& code, const FiniteSubset& F, int m, const Pattern& u) {
  const Subshift& X = code.source();
  const FiniteSubset V = window_for_radius(F, m);
  if (F.dim() == 1 && F.is_interval() && code.window().is_subset_of(FiniteSubset::ball(1, m))) {
    const auto k = static_cast<std::size_t>(X.alphabet());
    const std::int64_t a = V[0][0], b = V[V.size() - 1][0] + 1;
    const std::int64_t wr = code.window()[code.window().size() - 1][0];
    std::int64_t R = span1(code.window());
    for (const auto& w : X.forbidden()) R = std::max(R, span1(w.support()));
    const std::size_t kR = ipow(k, static_cast<std::size_t>(R));
    std::map<std::size_t, double> cur{{0, 0.0}}, next;
    std::vector<Symbol> loc(code.window().size());
    for (std::int64_t p = a; p < b; ++p) {
      next.clear();
      const Site h{p - wr};
      const auto want = u.at(h);
      const bool check = want.has_value() && F.contains(h);
      for (const auto& [state, val] : cur)
        for (std::size_t s = 0; s < k; ++s) {
          const std::size_t t = state + s * kR;
          if (forbidden_ends_at(X, p, a, R, k, t)) continue;
          if (check) {
            for (std::size_t i = 0; i < loc.size(); ++i) {
              const auto e = static_cast<std::size_t>(h[0] + code.window()[i][0] - (p - R));
              loc[i] = static_cast<Symbol>((t / ipow(k, e)) % k);
            }
            if (code.image_at(loc) != *want) continue;
          }
          auto [it, fresh] = next.try_emplace(t / k, val);
          if (!fresh) it->second = log_add(it->second, val);
        }
      std::swap(cur, next);
    }
    double total = -kInf;
    for (const auto& [s, v] : cur) total = log_add(total, v);
    return total;
  }
  ClassSumSpec spec(X, V.unite(F.sum(code.window())));
  std::set<std::vector<Symbol>> classes;
  for (const auto& c : enumerate_classes(spec)) {
    if (push_forward(code, c.pattern, F) != std::vector<Symbol>(u.symbols().begin(), u.symbols().end())) continue;
    const Pattern r = c.pattern.restrict_to(V);
    classes.emplace(r.symbols().begin(), r.symbols().end());
  }
  return classes.empty() ? -kInf : std::log(static_cast<double>(classes.size()));
}

FiberEntropy fiber_uc_entropy(const SlidingBlockCode& code, const FolnerSchedule& sched, const ScaleParams& params,
                              std::uint64_t seed, unsigned threads) {
  params.validate();
  if (sched.dim() != code.source().dim()) fail("factor/dimension", "schedule and code dimensions differ");
  FiberEntropy out;
  std::vector<SeriesPoint> series;
  for (std::size_t n = std::min(params.n_min, params.n_max - params.tail); n <= params.n_max; ++n) {
    const FiniteSubset& F = sched.at(n);
    bool sampled = false;
    const auto targets = fiber_targets(code, F, seed, n, sampled);
    out.lower_bound = out.lower_bound || sampled;
    std::vector<double> counts(targets.size(), -kInf);
    const auto work = [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) counts[i] = log_fiber_count(code, F, params.m, targets[i]);
    };
    const unsigned T = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(targets.size())));
    if (T == 1) {
      work(0, targets.size());
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (targets.size() + T - 1) / T;
      for (unsigned t = 0; t < T; ++t) {
        const std::size_t b = std::min(targets.size(), t * chunk), e = std::min(targets.size(), b + chunk);
        pool.emplace_back(work, b, e);
      }
      for (auto& th : pool) th.join();
    }
    out.targets_checked += targets.size();
    const double best = *std::max_element(counts.begin(), counts.end());
    if (best == -kInf) fail("factor/empty", "no target pattern has a preimage at n = " + std::to_string(n));
    series.push_back({n, F.size(), best});
  }
  const PressureEstimate e = capacity_from_series(series, params);
  out.value = e.value;
  out.raw_max = e.raw_max;
  out.series = e.series;
  return out;
}

// ---------------------------------------------------------------------------

Theorem12Report theorem12_check(const SlidingBlockCode& code, const FolnerSchedule& sched, const SubsetSpec& E,
                                const LocalPotential& f, const ScaleParams& params, std::uint64_t seed,
                                unsigned threads) {
  params.validate();
  Theorem12Report r;
  const auto img = image_series(code, sched, E, f, params);
  r.lhs = packing_from_series(img, params).value;
  const System src{code.source(), sched};
  const LocalPotential fp = compose(f, code);
  r.mid = packing_pressure(src, E, fp, params).value;
  const FiberEntropy fib = fiber_uc_entropy(code, sched, params, seed, threads);
  r.fiber = fib.value;
  r.fiber_lower_bound = fib.lower_bound;
  r.rhs = r.lhs + r.fiber;
  r.margin_left = r.mid - r.lhs;
  r.margin_right = r.rhs - r.mid;
  r.tolerance = 2 * params.tol_s;
  r.left_holds = r.margin_left >= -r.tolerance;
  r.right_holds = r.margin_right >= -r.tolerance;

  const std::int64_t rs = params.m + code.radius();
  for (const auto& pt : img) {
    if (pt.n < params.n_min) continue;
    const double s = log_separated_sum_radius(src, E, rs, pt.n, fp);
    const bool ok = pt.log_sum <= s + 1e-9 * std::max(1.0, std::abs(s));
    r.stages.push_back({pt.n, pt.log_sum, s, ok});
    r.stages_hold = r.stages_hold && ok;
  }
  r.uc_source = upper_capacity(src, E, fp, params).value;
  r.uc_image = capacity_from_series(img, params).value;
  r.uc_chain_holds = r.uc_source <= r.uc_image + r.fiber + r.tolerance;
  return r;
}

CoverCount lemma41_cover_count(const SlidingBlockCode& code, const PeriodicPoint& y, const FiniteSubset& F,
                               std::int64_t eta_radius, std::int64_t eps_radius, double a, double tau) {
  if (eps_radius < 0) fail("factor/scale", "source ball radius must be non-negative");
  if (y.dim() != F.dim() || F.dim() != code.source().dim()) fail("factor/dimension", "dimensions differ");
  const FiniteSubset Yw = window_for_radius(F, eta_radius);
  const FiniteSubset V = window_for_radius(F, eps_radius);
  const FiniteSubset U = Yw.empty() ? V : Yw.sum(code.window()).unite(V);
  ClassSumSpec spec(code.source(), U);
  std::vector<Symbol> target;
  for (const auto& h : Yw) target.push_back(y.at(h));

  std::set<std::vector<Symbol>> balls;
  std::vector<std::vector<Symbol>> pre;
  for (const auto& c : enumerate_classes(spec)) {
    if (!Yw.empty() && push_forward(code, c.pattern, Yw) != target) continue;
    const Pattern r = c.pattern.restrict_to(V);
    std::vector<Symbol> key(r.symbols().begin(), r.symbols().end());
    balls.insert(key);
    pre.push_back(std::move(key));
  }
  CoverCount out;
  out.l = balls.size();
  out.preimage_patterns = pre.size();
  out.log_l = out.l ? std::log(static_cast<double>(out.l)) : -kInf;
  out.log_bound = (a + 2 * tau) * static_cast<double>(F.size());
  out.within_bound = out.log_l <= out.log_bound + 1e-12;
  // every preimage point lies in the ball whose centre pattern it carries on V
  const std::vector<std::vector<Symbol>> centres(balls.begin(), balls.end());
  out.inclusion_verified = !pre.empty();
  for (const auto& p : pre)
    out.inclusion_verified = out.inclusion_verified && std::binary_search(centres.begin(), centres.end(), p);
  return out;
}

}  // namespace packp
