#include "packp/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "packp/classsum.hpp"

namespace packp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRatioThreshold = 1e-6;
constexpr std::size_t kMixedClassCap = 1 << 14;
constexpr std::size_t kDepthCylinderCap = 1 << 12;

std::int64_t radius_any(double eps, bool closed) {
  if (!(eps > 0)) fail("pressure/radius", "radius must be positive");
  if (eps > 1 || (eps == 1 && closed)) return -1;
  return window_radius(eps, closed);
}

ClassSumSpec base_spec(const System& sys, const SubsetSpec& Z, std::int64_t r, std::size_t n,
                       const LocalPotential& f) {
  const FiniteSubset& F = sys.schedule.at(n);
  ClassSumSpec spec(sys.shift, window_for_radius(F, r));
  spec.translates = F;
  spec.potential = &f;
  if (Z.kind == SubsetSpec::Kind::cylinder_union) spec.cylinders = Z.cylinders;
  return spec;
}

void check_system(const System& sys, const LocalPotential& f) {
  if (sys.schedule.dim() != sys.shift.dim()) fail("pressure/dimension", "schedule and subshift dimensions differ");
  if (f.alphabet() != sys.shift.alphabet()) fail("pressure/alphabet", "potential alphabet differs from subshift");
}

double log_sum(const System& sys, const SubsetSpec& Z, std::int64_t r, std::size_t n, const LocalPotential& f,
               bool spanning) {
  check_system(sys, f);
  if (Z.kind == SubsetSpec::Kind::point) {
    const PeriodicPoint& x = *Z.point;
    if (!x.admissible_in(sys.shift)) fail("pressure/point", "point is not in the subshift");
    const FiniteSubset& F = sys.schedule.at(n);
    if (!spanning) return potential_sum(f, x, F);
    ClassSumSpec spec(sys.shift, window_for_radius(F, r));
    spec.translates = F;
    spec.potential = &f;
    spec.extremum = Extremum::min;
    spec.fixed = x.pattern_on(spec.window);
    return log_class_sum(spec);
  }
  ClassSumSpec spec = base_spec(sys, Z, r, n, f);
  if (!spanning && Z.cylinders.size() == 1) {
    // one cylinder: pin its symbols instead of a membership table
    if (!sys.shift.admissible(Z.cylinders.front())) return -kInf;
    spec.cylinders.clear();
    spec.fixed = Z.cylinders.front();
  }
  if (spanning) {
    spec.extremum = Extremum::min;
    spec.extremum_over_whole_space = true;
  }
  return log_class_sum(spec);
}

struct Series {
  std::vector<SeriesPoint> points;  // indexed from `first`
  std::size_t first = 1;

  const SeriesPoint& at(std::size_t n) const { return points[n - first]; }
};

Series compute_series(const System& sys, const SubsetSpec& Z, std::int64_t r, const LocalPotential& f,
                      const ScaleParams& p, bool spanning) {
  Series s;
  s.first = std::min(p.n_min, p.n_max - p.tail);
  for (std::size_t n = s.first; n <= p.n_max; ++n) {
    const double L = log_sum(sys, Z, r, n, f, spanning);
    if (L == -kInf) fail("pressure/empty", "Z has no admissible pattern on the window of F_" + std::to_string(n));
    s.points.push_back({n, sys.schedule.at(n).size(), L});
  }
  return s;
}

/// Growth of log sums per added site over the tail.
double tail_rate(const Series& s, const ScaleParams& p) {
  const auto& a = s.at(p.n_max - p.tail);
  const auto& b = s.at(p.n_max);
  if (b.size == a.size) fail("pressure/schedule", "|F_n| constant over the ratio-test tail");
  return (b.log_sum - a.log_sum) / static_cast<double>(b.size - a.size);
}

Verdict ratio_verdict(const Series& s, const ScaleParams& p, double sexp) {
  const auto& a = s.at(p.n_max - p.tail);
  const auto& b = s.at(p.n_max);
  const double log_ratio =
      ((b.log_sum - sexp * static_cast<double>(b.size)) - (a.log_sum - sexp * static_cast<double>(a.size))) /
      static_cast<double>(p.tail);
  if (log_ratio > std::log1p(kRatioThreshold)) return Verdict::diverges;
  if (log_ratio < std::log1p(-kRatioThreshold)) return Verdict::vanishes;
  return Verdict::bracketed;
}

double log_sup_terms(const Series& s, const ScaleParams& p, double sexp) {
  double best = -kInf;
  for (std::size_t n = p.n_min; n <= p.n_max; ++n) {
    const auto& q = s.at(n);
    best = std::max(best, q.log_sum - sexp * static_cast<double>(q.size));
  }
  return best;
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::diverges || b == Verdict::diverges) return Verdict::diverges;
  if (a == Verdict::bracketed || b == Verdict::bracketed) return Verdict::bracketed;
  return Verdict::vanishes;
}

std::vector<SubsetSpec> pieces_of(const System& sys, const SubsetSpec& Z, int depth) {
  if (depth <= 0 || Z.kind == SubsetSpec::Kind::point) return {Z};
  std::vector<SubsetSpec> out;
  for (const auto& c : depth_cylinders(sys.shift, Z, depth)) out.push_back(Z.restricted(c));
  if (out.empty()) fail("pressure/empty", "Z has no admissible depth cylinder");
  return out;
}

struct OuterData {
  std::vector<Series> pieces;
};

PremeasureValue outer_value(const OuterData& d, const ScaleParams& p, double s) {
  double total = -kInf;
  Verdict v = Verdict::vanishes;
  for (const auto& piece : d.pieces) {
    total = log_add(total, log_sup_terms(piece, p, s));
    v = combine(v, ratio_verdict(piece, p, s));
  }
  return {total, v};
}

bool diverges_for_bisection(Verdict v) { return v != Verdict::vanishes; }

template <class VerdictAt>
std::pair<double, double> bisect(const ScaleParams& p, VerdictAt verdict_at, const std::string& what) {
  if (!diverges_for_bisection(verdict_at(p.s_lo)))
    fail_bracket("pressure/bracket", what + ": sums already vanish at s_lo = " + std::to_string(p.s_lo));
  if (diverges_for_bisection(verdict_at(p.s_hi)))
    fail_bracket("pressure/bracket", what + ": sums still diverge at s_hi = " + std::to_string(p.s_hi));
  double lo = p.s_lo, hi = p.s_hi;
  while (hi - lo > p.tol_s) {
    const double mid = 0.5 * (lo + hi);
    if (diverges_for_bisection(verdict_at(mid))) lo = mid;
    else hi = mid;
  }
  return {lo, hi};
}

double boundary_correction(const System& sys, std::int64_t r, std::size_t n) {
  const FiniteSubset& F = sys.schedule.at(n);
  const double w = static_cast<double>(window_for_radius(F, r).size());
  const double extra = std::max(0.0, w - static_cast<double>(F.size()));
  return extra * std::log(static_cast<double>(sys.shift.alphabet())) / static_cast<double>(F.size());
}

double raw_max(const Series& s, const ScaleParams& p) {
  double best = -kInf;
  for (std::size_t n = p.n_min; n <= p.n_max; ++n) {
    const auto& q = s.at(n);
    best = std::max(best, q.log_sum / static_cast<double>(q.size));
  }
  return best;
}

std::vector<SeriesPoint> trimmed(const Series& s, const ScaleParams& p) {
  std::vector<SeriesPoint> out;
  for (const auto& q : s.points)
    if (q.n >= p.n_min) out.push_back(q);
  return out;
}

std::string restriction_text(const ScaleParams& p, bool packing) {
  std::string r = packing ? "single-scale disjoint closed-ball families" : "single-scale open-ball covers";
  if (packing) r += ", depth-" + std::to_string(p.depth) + " cylinder decomposition";
  r += ", n in [" + std::to_string(p.n_min) + "," + std::to_string(p.n_max) + "], ratio test over last " +
       std::to_string(p.tail) + " scales";
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

SubsetSpec SubsetSpec::cylinder_union(std::vector<Pattern> cylinders) {
  if (cylinders.empty()) fail("pressure/subset", "cylinder union needs at least one cylinder");
  SubsetSpec z;
  z.kind = Kind::cylinder_union;
  z.cylinders = std::move(cylinders);
  return z;
}

SubsetSpec SubsetSpec::single(PeriodicPoint x) {
  SubsetSpec z;
  z.kind = Kind::point;
  z.point = std::move(x);
  return z;
}

bool SubsetSpec::contains(const PeriodicPoint& x) const {
  switch (kind) {
    case Kind::whole_space:
      return true;
    case Kind::point:
      return *point == x || point->pattern_on(FiniteSubset::ball(x.dim(), 64)) ==
                                x.pattern_on(FiniteSubset::ball(x.dim(), 64));
    case Kind::cylinder_union:
      for (const auto& c : cylinders)
        if (x.pattern_on(c.support()) == c) return true;
      return false;
  }
  return false;
}

SubsetSpec SubsetSpec::restricted(const Pattern& cylinder) const {
  switch (kind) {
    case Kind::whole_space:
      return cylinder_union({cylinder});
    case Kind::point:
      return *this;
    case Kind::cylinder_union: {
      SubsetSpec z;
      z.kind = Kind::cylinder_union;
      for (const auto& c : cylinders)
        if (c.compatible(cylinder)) z.cylinders.push_back(c.merge(cylinder));
      return z;
    }
  }
  return *this;
}

std::string SubsetSpec::describe() const {
  switch (kind) {
    case Kind::whole_space:
      return "X";
    case Kind::point: {
      std::string s = "point[";
      for (Symbol a : point->cells()) s += std::to_string(a);
      return s + "]";
    }
    case Kind::cylinder_union: {
      std::string s;
      for (const auto& c : cylinders) {
        if (!s.empty()) s += "|";
        s += "[" + c.to_string() + "@";
        const Site& o = c.support()[0];
        for (int i = 0; i < o.dim; ++i) s += (i ? "," : "") + std::to_string(o[i]);
        s += "]";
      }
      return s;
    }
  }
  return "";
}

void ScaleParams::validate() const {
  if (m < 0) fail("pressure/scale", "m must be non-negative");
  if (n_min < 1 || n_min > n_max) fail("pressure/scale", "need 1 <= n_min <= n_max");
  if (tail < 1 || tail >= n_max) fail("pressure/scale", "need 1 <= tail < n_max");
  if (!(s_lo < s_hi)) fail("pressure/scale", "need s_lo < s_hi");
  if (!(tol_s > 0)) fail("pressure/scale", "tol_s must be positive");
  if (depth < 0) fail("pressure/scale", "depth must be non-negative");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::diverges:
      return "diverges";
    case Verdict::vanishes:
      return "vanishes";
    case Verdict::bracketed:
      return "bracketed";
  }
  return "";
}

double log_separated_sum(const System& sys, const SubsetSpec& Z, int m, std::size_t n, const LocalPotential& f) {
  return log_sum(sys, Z, radius_any(scale_radius(m), true), n, f, false);
}

double log_spanning_sum(const System& sys, const SubsetSpec& Z, int m, std::size_t n, const LocalPotential& f) {
  return log_sum(sys, Z, radius_any(scale_radius(m), false), n, f, true);
}

double log_separated_sum_radius(const System& sys, const SubsetSpec& Z, std::int64_t r, std::size_t n,
                                const LocalPotential& f) {
  return log_sum(sys, Z, r, n, f, false);
}

double log_spanning_sum_radius(const System& sys, const SubsetSpec& Z, std::int64_t r, std::size_t n,
                               const LocalPotential& f) {
  return log_sum(sys, Z, r, n, f, true);
}

PressureEstimate upper_capacity_radius(const System& sys, const SubsetSpec& Z, std::int64_t r,
                                       const LocalPotential& f, const ScaleParams& params) {
  params.validate();
  const Series s = compute_series(sys, Z, r, f, params, false);
  PressureEstimate e;
  e.quantity = "upper_capacity";
  e.value = tail_rate(s, params);
  e.verdict = Verdict::bracketed;
  e.bracket_lo = e.bracket_hi = e.value;
  e.scale = params;
  e.boundary_correction = boundary_correction(sys, r, params.n_min);
  e.raw_max = raw_max(s, params);
  e.series = trimmed(s, params);
  e.restriction = "growth rate of log P_n over the last " + std::to_string(params.tail) + " scales";
  return e;
}

PressureEstimate upper_capacity(const System& sys, const SubsetSpec& Z, const LocalPotential& f,
                                const ScaleParams& params) {
  return upper_capacity_radius(sys, Z, radius_any(scale_radius(params.m), true), f, params);
}

PremeasureValue packing_premeasure(const System& sys, const SubsetSpec& Z, const LocalPotential& f, double s,
                                   const ScaleParams& params) {
  params.validate();
  const Series series = compute_series(sys, Z, radius_any(scale_radius(params.m), true), f, params, false);
  return {log_sup_terms(series, params, s), ratio_verdict(series, params, s)};
}

PremeasureValue packing_outer(const System& sys, const SubsetSpec& Z, const LocalPotential& f, double s,
                              const ScaleParams& params) {
  params.validate();
  const std::int64_t r = radius_any(scale_radius(params.m), true);
  OuterData d;
  for (const auto& piece : pieces_of(sys, Z, params.depth))
    d.pieces.push_back(compute_series(sys, piece, r, f, params, false));
  return outer_value(d, params, s);
}

PressureEstimate packing_pressure_pieces(const System& sys, const std::vector<SubsetSpec>& pieces,
                                         const LocalPotential& f, const ScaleParams& params) {
  params.validate();
  if (pieces.empty()) fail("pressure/subset", "no pieces given");
  const std::int64_t r = radius_any(scale_radius(params.m), true);
  OuterData d;
  for (const auto& piece : pieces) d.pieces.push_back(compute_series(sys, piece, r, f, params, false));
  const auto [lo, hi] = bisect(params, [&](double s) { return outer_value(d, params, s).verdict; }, "packing");
  PressureEstimate e;
  e.quantity = "packing_pressure";
  e.value = 0.5 * (lo + hi);
  e.verdict = Verdict::bracketed;
  e.bracket_lo = lo;
  e.bracket_hi = hi;
  e.scale = params;
  e.boundary_correction = boundary_correction(sys, r, params.n_min);
  if (d.pieces.size() == 1) {
    e.raw_max = raw_max(d.pieces.front(), params);
    e.series = trimmed(d.pieces.front(), params);
  }
  e.restriction = restriction_text(params, true) + ", " + std::to_string(pieces.size()) + " pieces";
  return e;
}

PressureEstimate packing_pressure(const System& sys, const SubsetSpec& Z, const LocalPotential& f,
                                  const ScaleParams& params) {
  params.validate();
  PressureEstimate e = packing_pressure_pieces(sys, pieces_of(sys, Z, params.depth), f, params);
  if (e.series.empty()) {
    const Series whole = compute_series(sys, Z, radius_any(scale_radius(params.m), true), f, params, false);
    e.raw_max = raw_max(whole, params);
    e.series = trimmed(whole, params);
  }
  e.restriction = restriction_text(params, true);
  if (params.mixed_search) {
    const auto mixed = mixed_scale_search(sys, Z, f, e.value, params);
    e.mixed_gain = mixed.log_mixed - mixed.log_single;
    e.mixed_beats_single = e.mixed_gain > 1e-9;
    e.restriction += ", greedy mixed-scale search";
  }
  return e;
}

PressureEstimate bowen_pressure(const System& sys, const SubsetSpec& Z, const LocalPotential& f,
                                const ScaleParams& params) {
  params.validate();
  const std::int64_t r = radius_any(scale_radius(params.m), false);
  const Series s = compute_series(sys, Z, r, f, params, true);
  const auto [lo, hi] = bisect(params, [&](double sx) { return ratio_verdict(s, params, sx); }, "bowen");
  PressureEstimate e;
  e.quantity = "bowen_pressure";
  e.value = 0.5 * (lo + hi);
  e.verdict = Verdict::bracketed;
  e.bracket_lo = lo;
  e.bracket_hi = hi;
  e.scale = params;
  e.boundary_correction = boundary_correction(sys, r, params.n_min);
  e.raw_max = raw_max(s, params);
  e.series = trimmed(s, params);
  e.restriction = restriction_text(params, false);
  return e;
}

namespace {

Series wrap_series(const std::vector<SeriesPoint>& pts, const ScaleParams& p) {
  p.validate();
  Series s;
  s.first = std::min(p.n_min, p.n_max - p.tail);
  if (pts.empty() || pts.front().n != s.first || pts.back().n != p.n_max || pts.size() != p.n_max - s.first + 1)
    fail("pressure/series", "series must cover n = " + std::to_string(s.first) + ".." + std::to_string(p.n_max));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].n != s.first + i) fail("pressure/series", "series indices must be consecutive");
    if (pts[i].log_sum == -kInf) fail("pressure/empty", "empty sum at n = " + std::to_string(pts[i].n));
  }
  s.points = pts;
  return s;
}

}  // namespace

PressureEstimate packing_from_series(const std::vector<SeriesPoint>& series, const ScaleParams& params) {
  const Series s = wrap_series(series, params);
  const auto [lo, hi] = bisect(params, [&](double sx) { return ratio_verdict(s, params, sx); }, "packing");
  PressureEstimate e;
  e.quantity = "packing_pressure";
  e.value = 0.5 * (lo + hi);
  e.verdict = Verdict::bracketed;
  e.bracket_lo = lo;
  e.bracket_hi = hi;
  e.scale = params;
  e.raw_max = raw_max(s, params);
  e.series = trimmed(s, params);
  e.restriction = restriction_text(params, true);
  return e;
}

PressureEstimate capacity_from_series(const std::vector<SeriesPoint>& series, const ScaleParams& params) {
  const Series s = wrap_series(series, params);
  PressureEstimate e;
  e.quantity = "upper_capacity";
  e.value = tail_rate(s, params);
  e.bracket_lo = e.bracket_hi = e.value;
  e.scale = params;
  e.raw_max = raw_max(s, params);
  e.series = trimmed(s, params);
  e.restriction = "growth rate of log P_n over the last " + std::to_string(params.tail) + " scales";
  return e;
}

// ---------------------------------------------------------------------------

MixedScaleResult mixed_scale_search(const System& sys, const SubsetSpec& Z, const LocalPotential& f, double s,
                                    const ScaleParams& params) {
  params.validate();
  check_system(sys, f);
  const std::int64_t r = radius_any(scale_radius(params.m), true);
  struct Ball {
    Pattern pattern;
    double log_weight;
  };
  std::vector<std::vector<Ball>> by_scale;
  std::vector<std::size_t> scales;
  for (std::size_t n = params.n_min; n <= params.n_max; ++n) {
    std::vector<Ball> balls;
    if (Z.kind == SubsetSpec::Kind::point) {
      const FiniteSubset W = window_for_radius(sys.schedule.at(n), r);
      balls.push_back({Z.point->pattern_on(W), potential_sum(f, *Z.point, sys.schedule.at(n))});
    } else {
      ClassSumSpec spec = base_spec(sys, Z, r, n, f);
      std::vector<ClassValue> classes;
      try {
        classes = enumerate_classes(spec);
      } catch (const Error& err) {
        if (err.kind() == Error::Kind::resource) continue;
        throw;
      }
      if (classes.size() > kMixedClassCap) continue;
      for (auto& c : classes) balls.push_back({std::move(c.pattern), c.value});
    }
    for (auto& b : balls) b.log_weight -= s * static_cast<double>(sys.schedule.at(n).size());
    by_scale.push_back(std::move(balls));
    scales.push_back(n);
  }
  if (by_scale.empty()) fail_resource("pressure/budget", "no scale small enough for the mixed-scale search");

  MixedScaleResult res;
  res.log_single = -kInf;
  std::size_t best = 0;
  for (std::size_t i = 0; i < by_scale.size(); ++i) {
    double t = -kInf;
    for (const auto& b : by_scale[i]) t = log_add(t, b.log_weight);
    if (t > res.log_single) {
      res.log_single = t;
      best = i;
    }
  }
  res.best_scale = scales[best];
  std::vector<const Pattern*> chosen;
  for (const auto& b : by_scale[best]) chosen.push_back(&b.pattern);
  std::vector<const Ball*> rest;
  for (std::size_t i = 0; i < by_scale.size(); ++i)
    if (i != best)
      for (const auto& b : by_scale[i]) rest.push_back(&b);
  std::stable_sort(rest.begin(), rest.end(), [](const Ball* a, const Ball* b) { return a->log_weight > b->log_weight; });
  res.log_mixed = res.log_single;
  for (const Ball* b : rest) {
    bool disjoint = true;
    for (const Pattern* c : chosen)
      if (c->compatible(b->pattern)) {
        disjoint = false;
        break;
      }
    if (!disjoint) continue;
    chosen.push_back(&b->pattern);
    res.log_mixed = log_add(res.log_mixed, b->log_weight);
    ++res.added;
  }
  return res;
}

std::vector<Pattern> depth_cylinders(const Subshift& X, const SubsetSpec& Z, int depth) {
  const FiniteSubset S = FiniteSubset::box(X.dim(), depth);
  const auto k = static_cast<std::size_t>(X.alphabet());
  std::size_t total = 1;
  for (std::size_t i = 0; i < S.size(); ++i) {
    total *= k;
    if (total > kDepthCylinderCap) fail_resource("pressure/budget", "too many depth cylinders");
  }
  std::vector<Pattern> out;
  std::vector<Symbol> syms(S.size());
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (auto& a : syms) {
      a = static_cast<Symbol>(c % k);
      c /= k;
    }
    Pattern p(S, syms);
    if (!X.admissible(p)) continue;
    bool meets = false;
    switch (Z.kind) {
      case SubsetSpec::Kind::whole_space:
        meets = true;
        break;
      case SubsetSpec::Kind::point:
        meets = Z.point->pattern_on(S) == p;
        break;
      case SubsetSpec::Kind::cylinder_union:
        for (const auto& cyl : Z.cylinders)
          if (cyl.compatible(p) && X.admissible(cyl.merge(p))) {
            meets = true;
            break;
          }
        break;
    }
    if (meets) out.push_back(std::move(p));
  }
  return out;
}

CoverWitness cover_refinement_witness(const System& sys, const SubsetSpec& Z, const LocalPotential& f,
                                      const ScaleParams& params, double delta) {
  if (!(delta > 0)) fail("pressure/delta", "delta must be positive");
  ScaleParams whole = params;
  whole.depth = 0;
  CoverWitness w;
  w.delta = delta;
  w.packing = packing_pressure(sys, Z, f, whole).value;
  const std::int64_t r3 = radius_any(3 * scale_radius(params.m), false);
  w.sup_pieces = -kInf;
  const int depth = std::max(params.depth, 1);
  for (const auto& c : depth_cylinders(sys.shift, Z, depth)) {
    const SubsetSpec piece = Z.restricted(c);
    const double uc = upper_capacity_radius(sys, piece, r3, f, params).value;
    w.pieces.push_back({c, uc});
    w.sup_pieces = std::max(w.sup_pieces, uc);
  }
  w.holds = w.packing + delta + params.tol_s >= w.sup_pieces;
  return w;
}

// ---------------------------------------------------------------------------

VitaliResult vitali_5r(const std::vector<BowenBall>& balls) {
  VitaliResult res;
  std::vector<Pattern> pattern(balls.size());
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const auto& b = balls[i];
    if (!(b.radius > 0)) fail("pressure/radius", "ball radius must be positive");
    pattern[i] = b.center.pattern_on(window_for_radius(b.F, radius_any(b.radius, b.closed)));
  }
  std::vector<std::size_t> order(balls.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return balls[a].radius > balls[b].radius; });
  for (std::size_t i : order) {
    bool disjoint = true;
    for (std::size_t j : res.selected)
      if (pattern[i].compatible(pattern[j])) {
        disjoint = false;
        break;
      }
    if (disjoint) res.selected.push_back(i);
  }
  for (std::size_t a = 0; a < res.selected.size(); ++a)
    for (std::size_t b = a + 1; b < res.selected.size(); ++b)
      if (pattern[res.selected[a]].compatible(pattern[res.selected[b]])) res.disjoint = false;

  // B_i inside B(x_j, 5 r_j): the dilated window is contained in W_i and the patterns agree there.
  std::vector<Pattern> dilated;
  for (std::size_t j : res.selected) {
    const auto& b = balls[j];
    dilated.push_back(b.center.pattern_on(window_for_radius(b.F, radius_any(5 * b.radius, b.closed))));
  }
  for (std::size_t i = 0; i < balls.size(); ++i) {
    bool covered = false;
    for (const auto& d : dilated)
      if (d.support().is_subset_of(pattern[i].support()) && pattern[i].restrict_to(d.support()) == d) {
        covered = true;
        break;
      }
    if (!covered) res.coverage_ok = false;
  }
  return res;
}

}  // namespace packp
