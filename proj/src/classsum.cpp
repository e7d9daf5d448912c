#include "packp/classsum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace packp {

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

namespace {

constexpr double kPosInf = std::numeric_limits<double>::infinity();

enum class Kind : std::uint8_t { sum, opt, fixed };

struct IdxFactor {
  std::vector<std::size_t> idx;  // positions in the region, table digit order
  std::size_t table;             // index into Problem::tables
};

struct Problem {
  int k = 2;
  int dim = 1;
  FiniteSubset region;
  std::vector<Kind> kind;
  std::vector<Symbol> fixed;
  std::vector<bool> in_window;
  std::vector<std::vector<double>> tables;
  std::vector<IdxFactor> factors;
  std::optional<IdxFactor> membership;  // kept apart when it only decides existence
  Extremum ext = Extremum::max;
};

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

std::size_t region_index(const FiniteSubset& region, const Site& s) {
  const auto i = region.index_of(s);
  if (i < 0) fail("classsum/region", "site outside assembled region");
  return static_cast<std::size_t>(i);
}

Problem build(const ClassSumSpec& spec) {
  const Subshift& X = *spec.shift;
  Problem P;
  P.k = X.alphabet();
  P.dim = X.dim();
  P.ext = spec.extremum;
  if (spec.window.size() > 0 && spec.window.dim() != X.dim())
    fail("classsum/dimension", "window dimension differs from subshift");

  FiniteSubset region = spec.window;
  if (spec.potential && !spec.translates.empty()) {
    if (spec.potential->alphabet() != P.k) fail("classsum/alphabet", "potential alphabet differs from subshift");
    region = region.unite(spec.translates.sum(spec.potential->window()));
  }
  for (const auto& c : spec.cylinders) region = region.unite(c.support());
  if (spec.fixed) region = region.unite(spec.fixed->support());
  for (const auto& f : spec.extra) region = region.unite(FiniteSubset(f.sites));
  if (region.empty()) region = FiniteSubset::cube(P.dim, 0, 1);
  if (P.dim == 1) {
    auto [lo, hi] = region.bounds();
    region = FiniteSubset::cube(1, lo[0], hi[0] + 1);
  }
  P.region = region;
  const std::size_t n = region.size();
  P.kind.assign(n, Kind::opt);
  P.fixed.assign(n, 0);
  P.in_window.assign(n, false);
  for (const auto& s : spec.window) {
    const auto i = region_index(region, s);
    P.kind[i] = Kind::sum;
    P.in_window[i] = true;
  }
  if (spec.fixed) {
    for (std::size_t j = 0; j < spec.fixed->size(); ++j) {
      const Symbol a = spec.fixed->symbols()[j];
      if (a < 0 || a >= P.k) fail("classsum/symbol", "fixed symbol outside alphabet");
      const auto i = region_index(region, spec.fixed->support()[j]);
      P.kind[i] = Kind::fixed;
      P.fixed[i] = a;
    }
  }

  if (spec.potential && !spec.translates.empty()) {
    P.tables.emplace_back(spec.potential->rule().begin(), spec.potential->rule().end());
    const std::size_t t = P.tables.size() - 1;
    for (const auto& g : spec.translates) {
      IdxFactor f{{}, t};
      for (const auto& w : spec.potential->window()) f.idx.push_back(region_index(region, g + w));
      P.factors.push_back(std::move(f));
    }
  }

  for (const auto& forb : X.forbidden()) {
    std::vector<double> table(ipow(static_cast<std::size_t>(P.k), forb.size()), 0.0);
    std::size_t code = 0;
    for (std::size_t j = forb.size(); j-- > 0;)
      code = code * static_cast<std::size_t>(P.k) + static_cast<std::size_t>(forb.symbols()[j]);
    table[code] = kNegInf;
    P.tables.push_back(std::move(table));
    const std::size_t t = P.tables.size() - 1;
    const Site anchor = forb.support()[0];
    for (const auto& r : region) {
      const Site shift = r - anchor;
      IdxFactor f{{}, t};
      bool inside = true;
      for (const auto& s : forb.support()) {
        const auto i = region.index_of(s + shift);
        if (i < 0) {
          inside = false;
          break;
        }
        f.idx.push_back(static_cast<std::size_t>(i));
      }
      if (inside) P.factors.push_back(std::move(f));
    }
  }

  if (!spec.cylinders.empty()) {
    FiniteSubset S;
    for (const auto& c : spec.cylinders) S = S.unite(c.support());
    if (pow_exceeds(static_cast<std::size_t>(P.k), S.size(), kEnumerationBudget))
      fail_resource("classsum/budget", "cylinder union support too large");
    const std::size_t total = ipow(static_cast<std::size_t>(P.k), S.size());
    std::vector<double> table(total, kNegInf);
    std::vector<Symbol> syms(S.size());
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      for (auto& a : syms) {
        a = static_cast<Symbol>(c % static_cast<std::size_t>(P.k));
        c /= static_cast<std::size_t>(P.k);
      }
      const Pattern p(S, syms);
      for (const auto& cyl : spec.cylinders)
        if (cyl.compatible(p)) {
          table[code] = 0.0;
          break;
        }
    }
    P.tables.push_back(std::move(table));
    IdxFactor f{{}, P.tables.size() - 1};
    for (const auto& s : S) f.idx.push_back(region_index(region, s));
    if (spec.extremum_over_whole_space) P.membership = std::move(f);
    else P.factors.push_back(std::move(f));
  }

  for (const auto& e : spec.extra) {
    if (e.table.size() != ipow(static_cast<std::size_t>(P.k), e.sites.size()))
      fail("classsum/factor", "extra factor table has wrong size");
    P.tables.push_back(e.table);
    IdxFactor f{{}, P.tables.size() - 1};
    for (const auto& s : e.sites) f.idx.push_back(region_index(region, s));
    P.factors.push_back(std::move(f));
  }
  return P;
}

// ---------------------------------------------------------------------------
// brute route

struct ClassAcc {
  double value;
  bool exists;
};

std::unordered_map<std::uint64_t, ClassAcc> brute_classes(const Problem& P, const ClassSumSpec& spec,
                                                          std::vector<std::size_t>& window_free) {
  const std::size_t n = P.region.size();
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i)
    if (P.kind[i] != Kind::fixed) free.push_back(i);
  if (pow_exceeds(static_cast<std::size_t>(P.k), free.size(), kEnumerationBudget))
    fail_resource("classsum/budget", "enumeration of " + std::to_string(free.size()) + " free sites exceeds budget");
  window_free.clear();
  for (std::size_t i : free)
    if (P.in_window[i]) window_free.push_back(i);

  std::vector<Symbol> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = P.kind[i] == Kind::fixed ? P.fixed[i] : 0;
  const auto eval = [&](const IdxFactor& f) {
    std::size_t code = 0;
    for (std::size_t j = f.idx.size(); j-- > 0;)
      code = code * static_cast<std::size_t>(P.k) + static_cast<std::size_t>(x[f.idx[j]]);
    return P.tables[f.table][code];
  };

  std::unordered_map<std::uint64_t, ClassAcc> classes;
  while (true) {
    double total = 0.0;
    for (const auto& f : P.factors) {
      total += eval(f);
      if (total == kNegInf) break;
    }
    if (total != kNegInf) {
      bool member = true;
      if (P.membership) member = eval(*P.membership) == 0.0;
      if (member && spec.predicate) member = spec.predicate(Pattern(P.region, x));
      if (member || spec.extremum_over_whole_space) {
        std::uint64_t key = 0;
        for (std::size_t j = window_free.size(); j-- > 0;)
          key = key * static_cast<std::uint64_t>(P.k) + static_cast<std::uint64_t>(x[window_free[j]]);
        auto [it, fresh] = classes.try_emplace(key, ClassAcc{total, member});
        if (!fresh) {
          it->second.value = P.ext == Extremum::max ? std::max(it->second.value, total)
                                                    : std::min(it->second.value, total);
          it->second.exists = it->second.exists || member;
        }
      }
    }
    std::size_t j = 0;
    for (; j < free.size(); ++j) {
      if (++x[free[j]] < P.k) break;
      x[free[j]] = 0;
    }
    if (j == free.size()) break;
  }
  return classes;
}

// ---------------------------------------------------------------------------
// chain route

struct Chain {
  int k = 2;
  std::size_t L = 0;
  std::size_t R = 0;
  std::vector<Kind> kind;
  std::vector<Symbol> fixed;
  const std::vector<std::vector<double>>* tables = nullptr;
  std::vector<IdxFactor> factors;  // idx are positions
  Extremum ext = Extremum::max;
};

Chain mirrored(const Chain& c) {
  Chain m = c;
  std::reverse(m.kind.begin(), m.kind.end());
  std::reverse(m.fixed.begin(), m.fixed.end());
  for (auto& f : m.factors)
    for (auto& p : f.idx) p = c.L - 1 - p;
  return m;
}

Kind kind_at(const Chain& c, std::ptrdiff_t pos) {
  return pos < 0 ? Kind::fixed : c.kind[static_cast<std::size_t>(pos)];
}

double combine(Kind kind, Extremum ext, double acc, double v) {
  if (v == kNegInf) return acc;
  if (kind != Kind::opt) return log_add(acc, v);
  if (ext == Extremum::max) return std::max(acc, v);
  return std::min(acc, v);
}

double init_for(Kind kind, Extremum ext) {
  return (kind == Kind::opt && ext == Extremum::min) ? kPosInf : kNegInf;
}

/// Messages over the R sites [stop-R, stop), digit j <-> position stop-R+j.
std::vector<double> forward(const Chain& c, std::size_t stop) {
  const auto k = static_cast<std::size_t>(c.k);
  const std::size_t S = ipow(k, c.R);
  const std::size_t kR = S;
  std::vector<double> msg(S, kNegInf), next(S);
  msg[0] = 0.0;

  // factors bucketed by their largest position, with digit offsets
  struct Local {
    std::vector<std::size_t> digit_pow;  // k^digit for each factor site
    const std::vector<double>* table;
  };
  std::vector<std::vector<Local>> at(c.L);
  for (const auto& f : c.factors) {
    const std::size_t last = *std::max_element(f.idx.begin(), f.idx.end());
    Local l{{}, &(*c.tables)[f.table]};
    for (std::size_t p : f.idx) l.digit_pow.push_back(ipow(k, p + c.R - last));
    at[last].push_back(std::move(l));
  }

  for (std::size_t i = 0; i < stop; ++i) {
    const Kind leaving = kind_at(c, static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(c.R));
    std::fill(next.begin(), next.end(), init_for(leaving, c.ext));
    for (std::size_t old = 0; old < S; ++old) {
      if (msg[old] == kNegInf) continue;
      for (std::size_t a = 0; a < k; ++a) {
        if (c.kind[i] == Kind::fixed && a != static_cast<std::size_t>(c.fixed[i])) continue;
        const std::size_t t = old + a * kR;
        double v = msg[old];
        for (const auto& l : at[i]) {
          std::size_t code = 0, w = 1;
          for (std::size_t dp : l.digit_pow) {
            code += ((t / dp) % k) * w;
            w *= k;
          }
          v += (*l.table)[code];
          if (v == kNegInf) break;
        }
        const std::size_t nc = t / k;
        next[nc] = combine(leaving, c.ext, next[nc], v);
      }
    }
    for (double& v : next)
      if (v == kPosInf) v = kNegInf;
    std::swap(msg, next);
  }
  return msg;
}

/// Eliminates the remaining state sites oldest first.
double finish(const Chain& c, std::vector<double> msg, std::size_t stop) {
  const auto k = static_cast<std::size_t>(c.k);
  for (std::size_t r = c.R; r > 0; --r) {
    const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(stop) - static_cast<std::ptrdiff_t>(r);
    const Kind kd = kind_at(c, pos);
    std::vector<double> out(msg.size() / k, init_for(kd, c.ext));
    for (std::size_t code = 0; code < msg.size(); ++code) out[code / k] = combine(kd, c.ext, out[code / k], msg[code]);
    for (double& v : out)
      if (v == kPosInf) v = kNegInf;
    msg = std::move(out);
  }
  return msg[0];
}

double chain_solve(const Problem& P, const std::size_t win_lo, const std::size_t win_hi) {
  Chain c;
  c.k = P.k;
  c.L = P.region.size();
  c.kind = P.kind;
  c.fixed = P.fixed;
  c.tables = &P.tables;
  c.factors = P.factors;
  // plan_chain only admits a membership factor living on summed or fixed sites
  if (P.membership) c.factors.push_back(*P.membership);
  c.ext = P.ext;
  for (const auto& f : c.factors) {
    const auto [lo, hi] = std::minmax_element(f.idx.begin(), f.idx.end());
    c.R = std::max(c.R, *hi - *lo);
  }
  bool left_opt = false, right_opt = false;
  for (std::size_t p = 0; p < c.L; ++p) {
    if (c.kind[p] != Kind::opt) continue;
    if (p < win_lo) left_opt = true;
    if (p >= win_hi) right_opt = true;
  }
  if (!right_opt) return finish(c, forward(c, c.L), c.L);
  const Chain m = mirrored(c);
  if (!left_opt) return finish(m, forward(m, m.L), m.L);

  const std::size_t cut = win_lo + (win_hi - win_lo) / 2;
  const auto fwd = forward(c, cut);
  const auto bwd = forward(m, c.L - cut);
  const auto k = static_cast<std::size_t>(c.k);
  std::vector<const IdxFactor*> straddle;
  for (const auto& f : c.factors) {
    const auto [lo, hi] = std::minmax_element(f.idx.begin(), f.idx.end());
    if (*lo < cut && *hi >= cut) straddle.push_back(&f);
  }
  std::vector<Symbol> sym(2 * c.R);  // positions cut-R .. cut+R-1
  double total = kNegInf;
  for (std::size_t fc = 0; fc < fwd.size(); ++fc) {
    if (fwd[fc] == kNegInf) continue;
    for (std::size_t j = 0, t = fc; j < c.R; ++j, t /= k) sym[j] = static_cast<Symbol>(t % k);
    for (std::size_t bc = 0; bc < bwd.size(); ++bc) {
      if (bwd[bc] == kNegInf) continue;
      for (std::size_t j = 0, t = bc; j < c.R; ++j, t /= k) sym[2 * c.R - 1 - j] = static_cast<Symbol>(t % k);
      double v = fwd[fc] + bwd[bc];
      for (const IdxFactor* f : straddle) {
        std::size_t code = 0;
        for (std::size_t j = f->idx.size(); j-- > 0;)
          code = code * k + static_cast<std::size_t>(sym[f->idx[j] + c.R - cut]);
        v += P.tables[f->table][code];
      }
      total = log_add(total, v);
    }
  }
  return total;
}

struct ChainPlan {
  bool ok = false;
  std::size_t win_lo = 0, win_hi = 0;
};

ChainPlan plan_chain(const Problem& P, const ClassSumSpec& spec) {
  ChainPlan plan;
  if (P.dim != 1 || spec.predicate) return plan;
  if (!spec.window.empty() && !spec.window.is_interval()) return plan;
  if (P.membership) {
    for (std::size_t i : P.membership->idx)
      if (P.kind[i] == Kind::opt) return plan;
  }
  const auto k = static_cast<std::size_t>(P.k);
  std::size_t R = 0;
  for (const auto& f : P.factors) {
    const auto [lo, hi] = std::minmax_element(f.idx.begin(), f.idx.end());
    R = std::max(R, *hi - *lo);
  }
  if (P.membership) {
    const auto [lo, hi] = std::minmax_element(P.membership->idx.begin(), P.membership->idx.end());
    R = std::max(R, *hi - *lo);
  }
  if (pow_exceeds(k, 2 * R + 1, kEnumerationBudget)) return plan;
  if (spec.window.empty()) {
    plan.win_lo = plan.win_hi = P.region.size();
  } else {
    plan.win_lo = static_cast<std::size_t>(P.region.index_of(spec.window[0]));
    plan.win_hi = plan.win_lo + spec.window.size();
  }
  bool left_opt = false, right_opt = false;
  for (std::size_t p = 0; p < P.region.size(); ++p) {
    if (P.kind[p] != Kind::opt) continue;
    if (p < plan.win_lo) left_opt = true;
    if (p >= plan.win_hi) right_opt = true;
  }
  if (left_opt && right_opt) {
    const std::size_t cut = plan.win_lo + (plan.win_hi - plan.win_lo) / 2;
    if (cut < plan.win_lo + R || cut + R > plan.win_hi) return plan;
  }
  plan.ok = true;
  return plan;
}

double sum_classes(const std::unordered_map<std::uint64_t, ClassAcc>& classes) {
  // deterministic order: sort keys
  std::vector<std::uint64_t> keys;
  keys.reserve(classes.size());
  for (const auto& [key, acc] : classes) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  double total = kNegInf;
  for (auto key : keys) {
    const auto& acc = classes.at(key);
    if (acc.exists) total = log_add(total, acc.value);
  }
  return total;
}

}  // namespace

ClassSumRoute choose_route(const ClassSumSpec& spec) {
  const Problem P = build(spec);
  return plan_chain(P, spec).ok ? ClassSumRoute::chain : ClassSumRoute::brute;
}

double log_class_sum(const ClassSumSpec& spec) {
  const Problem P = build(spec);
  const ChainPlan plan = plan_chain(P, spec);
  if (plan.ok) return chain_solve(P, plan.win_lo, plan.win_hi);
  std::vector<std::size_t> wf;
  return sum_classes(brute_classes(P, spec, wf));
}

double log_class_sum_brute(const ClassSumSpec& spec) {
  const Problem P = build(spec);
  std::vector<std::size_t> wf;
  return sum_classes(brute_classes(P, spec, wf));
}

std::vector<ClassValue> enumerate_classes(const ClassSumSpec& spec) {
  const Problem P = build(spec);
  std::vector<std::size_t> window_free;
  const auto classes = brute_classes(P, spec, window_free);
  std::vector<std::uint64_t> keys;
  for (const auto& [key, acc] : classes)
    if (acc.exists && acc.value != kNegInf) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  std::vector<ClassValue> out;
  out.reserve(keys.size());
  const auto k = static_cast<std::uint64_t>(P.k);
  for (auto key : keys) {
    std::vector<Symbol> x(P.region.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = P.fixed[i];
    std::uint64_t t = key;
    for (std::size_t i : window_free) {
      x[i] = static_cast<Symbol>(t % k);
      t /= k;
    }
    std::vector<Symbol> wsyms;
    for (const auto& s : spec.window) wsyms.push_back(x[static_cast<std::size_t>(P.region.index_of(s))]);
    out.push_back({Pattern(spec.window, std::move(wsyms)), classes.at(key).value});
  }
  return out;
}

}  // namespace packp
