#include "packp/shiftspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "packp/classsum.hpp"

namespace packp {

Alphabet::Alphabet(int k) : size(k) {
  if (k < 2) fail("shiftspace/alphabet", "alphabet needs at least two symbols");
}

// ---------------------------------------------------------------------------
// Pattern

Pattern::Pattern(FiniteSubset support, std::vector<Symbol> symbols)
    : support_(std::move(support)), symbols_(std::move(symbols)) {
  if (support_.size() != symbols_.size())
    fail("shiftspace/pattern", "pattern support and symbol count differ (duplicate sites?)");
}

Pattern Pattern::from_pairs(std::vector<std::pair<Site, Symbol>> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Site> sites;
  std::vector<Symbol> syms;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].first == entries[i - 1].first) {
      if (entries[i].second != entries[i - 1].second)
        fail("shiftspace/pattern", "conflicting symbols at one site");
      continue;
    }
    sites.push_back(entries[i].first);
    syms.push_back(entries[i].second);
  }
  return Pattern(FiniteSubset(std::move(sites)), std::move(syms));
}

Pattern Pattern::word(std::span<const Symbol> w, std::int64_t offset) {
  std::vector<Site> sites;
  for (std::size_t i = 0; i < w.size(); ++i) sites.push_back(Site{offset + static_cast<std::int64_t>(i)});
  return Pattern(FiniteSubset(std::move(sites)), std::vector<Symbol>(w.begin(), w.end()));
}

Pattern Pattern::word(std::initializer_list<Symbol> w, std::int64_t offset) {
  return word(std::span<const Symbol>(w.begin(), w.size()), offset);
}

std::optional<Symbol> Pattern::at(const Site& s) const {
  const auto i = support_.index_of(s);
  if (i < 0) return std::nullopt;
  return symbols_[static_cast<std::size_t>(i)];
}

Pattern Pattern::translate(const Site& g) const { return Pattern(support_.translate(g), symbols_); }

Pattern Pattern::restrict_to(const FiniteSubset& sub) const {
  std::vector<Site> sites;
  std::vector<Symbol> syms;
  for (std::size_t i = 0; i < support_.size(); ++i)
    if (sub.contains(support_[i])) {
      sites.push_back(support_[i]);
      syms.push_back(symbols_[i]);
    }
  return Pattern(FiniteSubset(std::move(sites)), std::move(syms));
}

bool Pattern::compatible(const Pattern& o) const {
  // both supports sorted: merge walk
  std::size_t i = 0, j = 0;
  while (i < support_.size() && j < o.support_.size()) {
    if (support_[i] < o.support_[j]) {
      ++i;
    } else if (o.support_[j] < support_[i]) {
      ++j;
    } else {
      if (symbols_[i] != o.symbols_[j]) return false;
      ++i;
      ++j;
    }
  }
  return true;
}

Pattern Pattern::merge(const Pattern& o) const {
  if (!compatible(o)) fail("shiftspace/pattern", "merging incompatible patterns");
  std::vector<std::pair<Site, Symbol>> e;
  for (std::size_t i = 0; i < support_.size(); ++i) e.emplace_back(support_[i], symbols_[i]);
  for (std::size_t i = 0; i < o.support_.size(); ++i) e.emplace_back(o.support_[i], o.symbols_[i]);
  return from_pairs(std::move(e));
}

std::string Pattern::to_string() const {
  std::string s;
  for (Symbol a : symbols_) s += (a < 10) ? static_cast<char>('0' + a) : '?';
  return s;
}

// ---------------------------------------------------------------------------
// Subshift

Subshift::Subshift(int alphabet, int dim, std::vector<Pattern> forbidden)
    : k_(Alphabet(alphabet).size), d_(dim), forbidden_(std::move(forbidden)) {
  if (dim < 1 || dim > kMaxDim) fail("shiftspace/dimension", "dimension must be 1..3");
  for (const auto& p : forbidden_) {
    if (p.size() == 0) fail("shiftspace/forbidden", "empty forbidden pattern");
    if (p.dim() != dim) fail("shiftspace/dimension", "forbidden pattern of wrong dimension");
    for (Symbol a : p.symbols())
      if (a < 0 || a >= k_) fail("shiftspace/symbol", "forbidden pattern symbol outside alphabet");
  }
}

Subshift Subshift::full(int k, int d) { return Subshift(k, d); }

Subshift Subshift::golden_mean(int d) {
  std::vector<Pattern> forb;
  for (int axis = 0; axis < d; ++axis) {
    Site o(d), e(d);
    e[axis] = 1;
    forb.push_back(Pattern::from_pairs({{o, 1}, {e, 1}}));
  }
  return Subshift(2, d, std::move(forb));
}

std::int64_t Subshift::memory() const {
  std::int64_t m = 0;
  for (const auto& p : forbidden_) {
    auto [lo, hi] = p.support().bounds();
    m = std::max(m, (hi - lo).norm_inf());
  }
  return m;
}

bool Subshift::admissible(const Pattern& p) const {
  const auto& supp = p.support();
  for (Symbol a : p.symbols())
    if (a < 0 || a >= k_) return false;
  for (const auto& f : forbidden_) {
    const Site anchor = f.support()[0];
    for (const auto& s : supp) {
      const Site t = s - anchor;
      bool inside = true, match = true;
      for (std::size_t i = 0; i < f.size() && inside; ++i) {
        const auto v = p.at(f.support()[i] + t);
        if (!v) inside = false;
        else if (*v != f.symbols()[i]) match = false;
      }
      if (inside && match) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// PeriodicPoint

PeriodicPoint::PeriodicPoint(Site period, std::vector<Symbol> cells)
    : period_(period), cells_(std::move(cells)) {
  std::size_t vol = 1;
  for (int i = 0; i < period_.dim; ++i) {
    if (period_[i] <= 0) fail("shiftspace/period", "periods must be positive");
    vol *= static_cast<std::size_t>(period_[i]);
  }
  if (vol != cells_.size()) fail("shiftspace/period", "fundamental pattern size does not match period");
}

PeriodicPoint PeriodicPoint::word(std::vector<Symbol> w) {
  const auto n = static_cast<std::int64_t>(w.size());
  return PeriodicPoint(Site{n}, std::move(w));
}

PeriodicPoint PeriodicPoint::constant(int d, Symbol a) {
  Site p(d);
  for (int i = 0; i < d; ++i) p[i] = 1;
  return PeriodicPoint(p, {a});
}

std::size_t PeriodicPoint::offset(const Site& h) const {
  std::size_t off = 0;
  for (int i = 0; i < period_.dim; ++i) {
    std::int64_t r = h[i] % period_[i];
    if (r < 0) r += period_[i];
    off = off * static_cast<std::size_t>(period_[i]) + static_cast<std::size_t>(r);
  }
  return off;
}

Symbol PeriodicPoint::at(const Site& h) const { return cells_[offset(h)]; }

PeriodicPoint PeriodicPoint::shifted(const Site& g) const {
  std::vector<Symbol> out(cells_.size());
  Site h(dim());
  for (std::size_t idx = 0; idx < cells_.size(); ++idx) {
    std::size_t rem = idx;
    for (int i = dim() - 1; i >= 0; --i) {
      h[i] = static_cast<std::int64_t>(rem % static_cast<std::size_t>(period_[i]));
      rem /= static_cast<std::size_t>(period_[i]);
    }
    out[idx] = at(h + g);
  }
  return PeriodicPoint(period_, std::move(out));
}

Pattern PeriodicPoint::pattern_on(const FiniteSubset& W) const {
  std::vector<Symbol> syms;
  syms.reserve(W.size());
  for (const auto& s : W) syms.push_back(at(s));
  return Pattern(W, std::move(syms));
}

Site PeriodicPoint::joint_period(const PeriodicPoint& a, const PeriodicPoint& b) {
  if (a.dim() != b.dim()) fail("shiftspace/dimension", "points of different dimension");
  Site p(a.dim());
  std::int64_t L = 1;
  for (int i = 0; i < a.dim(); ++i) L = std::lcm(L, std::lcm(a.period_[i], b.period_[i]));
  for (int i = 0; i < a.dim(); ++i) p[i] = L;
  return p;
}

bool PeriodicPoint::admissible_in(const Subshift& X) const {
  if (X.dim() != dim()) return false;
  std::int64_t L = 1;
  for (int i = 0; i < dim(); ++i) L = std::max(L, period_[i]);
  const std::int64_t span = 3 * L + X.memory();
  return X.admissible(pattern_on(FiniteSubset::cube(dim(), 0, span)));
}

// ---------------------------------------------------------------------------
// LocalPotential

namespace {
std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}
}  // namespace

LocalPotential::LocalPotential(int alphabet, FiniteSubset window, std::vector<double> rule)
    : k_(Alphabet(alphabet).size), window_(std::move(window)), rule_(std::move(rule)) {
  if (window_.empty() || !window_.contains(Site::zero(window_.dim())))
    fail("shiftspace/potential", "potential window must contain the origin");
  if (rule_.size() != ipow(static_cast<std::size_t>(k_), window_.size()))
    fail("shiftspace/potential", "rule table must have k^|W| entries");
  for (double v : rule_)
    if (!std::isfinite(v)) fail("shiftspace/potential", "potential values must be finite");
}

LocalPotential LocalPotential::constant(int k, int d, double c) {
  return LocalPotential(k, FiniteSubset::ball(d, 0), std::vector<double>(static_cast<std::size_t>(k), c));
}

LocalPotential LocalPotential::symbol_linear(int k, int d, double t) {
  std::vector<double> rule(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) rule[static_cast<std::size_t>(a)] = t * a;
  return LocalPotential(k, FiniteSubset::ball(d, 0), std::move(rule));
}

LocalPotential LocalPotential::from_function(int k, FiniteSubset window,
                                             const std::function<double(std::span<const Symbol>)>& fn) {
  const std::size_t w = window.size();
  const std::size_t total = ipow(static_cast<std::size_t>(k), w);
  std::vector<double> rule(total);
  std::vector<Symbol> syms(w);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < w; ++i) {
      syms[i] = static_cast<Symbol>(c % static_cast<std::size_t>(k));
      c /= static_cast<std::size_t>(k);
    }
    rule[code] = fn(syms);
  }
  return LocalPotential(k, std::move(window), std::move(rule));
}

double LocalPotential::norm_inf() const {
  double m = 0;
  for (double v : rule_) m = std::max(m, std::abs(v));
  return m;
}

LocalPotential LocalPotential::plus(double c) const {
  std::vector<double> r = rule_;
  for (double& v : r) v += c;
  return LocalPotential(k_, window_, std::move(r));
}

double LocalPotential::of_pattern(std::span<const Symbol> s) const {
  std::size_t code = 0;
  for (std::size_t i = s.size(); i-- > 0;) code = code * static_cast<std::size_t>(k_) + static_cast<std::size_t>(s[i]);
  return rule_[code];
}

double LocalPotential::at(const PeriodicPoint& x, const Site& g) const {
  std::size_t code = 0;
  for (std::size_t i = window_.size(); i-- > 0;)
    code = code * static_cast<std::size_t>(k_) + static_cast<std::size_t>(x.at(window_[i] + g));
  return rule_[code];
}

// ---------------------------------------------------------------------------
// Metric

std::int64_t window_radius(double eps, bool closed) {
  if (!(eps > 0) || eps > 1) fail("shiftspace/radius", "radius must lie in (0,1]");
  int e = 0;
  const double mant = std::frexp(eps, &e);  // eps = mant * 2^e, mant in [0.5, 1)
  const bool dyadic = (mant == 0.5);
  // d < eps  <=> disagreement norm > log2(1/eps)
  // d <= eps <=> disagreement norm >= log2(1/eps)
  if (dyadic) return closed ? -e : 1 - e;  // eps = 2^(e-1)
  return -e;
}

double scale_radius(int m) {
  if (m < 0) fail("shiftspace/scale", "scale index must be non-negative");
  return 0.75 * std::ldexp(1.0, -m);
}

double metric_distance(const PeriodicPoint& x, const PeriodicPoint& y) {
  if (x.dim() != y.dim()) fail("shiftspace/dimension", "points of different dimension");
  const Site L = PeriodicPoint::joint_period(x, y);
  // Disagreements repeat with period L, so the nearest one has norm <= L.
  for (std::int64_t r = 0; r <= L[0]; ++r) {
    const FiniteSubset shell = FiniteSubset::ball(x.dim(), r).minus(FiniteSubset::ball(x.dim(), r - 1));
    for (const auto& h : shell)
      if (x.at(h) != y.at(h)) return std::ldexp(1.0, static_cast<int>(-r));
  }
  return 0.0;
}

double bowen_distance(const PeriodicPoint& x, const PeriodicPoint& y, const FiniteSubset& F) {
  double d = 0;
  for (const auto& g : F) d = std::max(d, metric_distance(x.shifted(g), y.shifted(g)));
  return d;
}

FiniteSubset window_for_radius(const FiniteSubset& F, std::int64_t r) {
  if (r < 0) {
    FiniteSubset e = FiniteSubset::cube(F.dim(), 0, 0);
    return e;
  }
  return F.sum(FiniteSubset::ball(F.dim(), r));
}

FiniteSubset ball_window(const FiniteSubset& F, double eps, bool closed) {
  return window_for_radius(F, window_radius(eps, closed));
}

// ---------------------------------------------------------------------------

double potential_sum(const LocalPotential& f, const PeriodicPoint& x, const FiniteSubset& F) {
  double s = 0;
  for (const auto& g : F) s += f.at(x, g);
  return s;
}

double potential_sup_ball(const Subshift& X, const LocalPotential& f, const PeriodicPoint& x,
                          const FiniteSubset& F, double eps, bool closed) {
  const FiniteSubset W = ball_window(F, eps, closed);
  ClassSumSpec spec(X, W);
  spec.translates = F;
  spec.potential = &f;
  spec.extremum = Extremum::max;
  spec.fixed = x.pattern_on(W);
  const auto classes = enumerate_classes(spec);
  if (classes.empty()) fail("shiftspace/ball", "ball around x has no admissible completion");
  return classes.front().value;
}

double variation(const LocalPotential& f, double eps) {
  const std::int64_t r = window_radius(eps, true);
  const FiniteSubset& W = f.window();
  const FiniteSubset agree = W.intersect(FiniteSubset::ball(W.dim(), r));
  std::vector<std::size_t> agree_idx;
  for (std::size_t i = 0; i < W.size(); ++i)
    if (agree.contains(W[i])) agree_idx.push_back(i);
  const auto k = static_cast<std::size_t>(f.alphabet());
  std::map<std::size_t, std::pair<double, double>> range;
  const auto rule = f.rule();
  for (std::size_t code = 0; code < rule.size(); ++code) {
    std::size_t key = 0;
    for (std::size_t j = agree_idx.size(); j-- > 0;) key = key * k + (code / ipow(k, agree_idx[j])) % k;
    auto [it, fresh] = range.try_emplace(key, rule[code], rule[code]);
    if (!fresh) {
      it->second.first = std::min(it->second.first, rule[code]);
      it->second.second = std::max(it->second.second, rule[code]);
    }
  }
  double v = 0;
  for (const auto& [key, mm] : range) v = std::max(v, mm.second - mm.first);
  return v;
}

}  // namespace packp
