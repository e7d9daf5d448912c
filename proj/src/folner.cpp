#include "packp/folner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace packp {

Site::Site(std::initializer_list<std::int64_t> coords) : dim(static_cast<int>(coords.size())) {
  if (coords.size() == 0 || coords.size() > kMaxDim) fail("folner/dimension", "site dimension must be 1..3");
  std::copy(coords.begin(), coords.end(), c.begin());
}

Site Site::operator+(const Site& o) const {
  Site r(dim);
  for (int i = 0; i < dim; ++i) r[i] = (*this)[i] + o[i];
  return r;
}

Site Site::operator-(const Site& o) const {
  Site r(dim);
  for (int i = 0; i < dim; ++i) r[i] = (*this)[i] - o[i];
  return r;
}

Site Site::operator-() const {
  Site r(dim);
  for (int i = 0; i < dim; ++i) r[i] = -(*this)[i];
  return r;
}

std::int64_t Site::norm_inf() const {
  std::int64_t m = 0;
  for (int i = 0; i < dim; ++i) m = std::max(m, std::abs((*this)[i]));
  return m;
}

std::strong_ordering operator<=>(const Site& a, const Site& b) {
  if (auto cmp = a.dim <=> b.dim; cmp != 0) return cmp;
  for (int i = 0; i < a.dim; ++i)
    if (auto cmp = a[i] <=> b[i]; cmp != 0) return cmp;
  return std::strong_ordering::equal;
}

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) fail("folner/rational", "zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num) * b.den <=> static_cast<__int128>(b.num) * a.den;
}

// ---------------------------------------------------------------------------

FiniteSubset::FiniteSubset(std::vector<Site> sites) : sites_(std::move(sites)) {
  if (!sites_.empty()) {
    dim_ = sites_.front().dim;
    for (const auto& s : sites_)
      if (s.dim != dim_) fail("folner/dimension", "mixed dimensions in finite subset");
  }
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

FiniteSubset FiniteSubset::cube(int d, std::int64_t lo, std::int64_t hi) {
  if (d < 1 || d > kMaxDim) fail("folner/dimension", "dimension must be 1..3");
  std::vector<Site> out;
  if (hi <= lo) {
    FiniteSubset e;
    e.dim_ = d;
    return e;
  }
  Site s(d);
  for (int i = 0; i < d; ++i) s[i] = lo;
  while (true) {
    out.push_back(s);
    int i = d - 1;
    while (i >= 0 && ++s[i] == hi) {
      s[i] = lo;
      --i;
    }
    if (i < 0) break;
  }
  FiniteSubset r(std::move(out));
  r.dim_ = d;
  return r;
}

FiniteSubset FiniteSubset::box(int d, std::int64_t n) { return cube(d, 0, n); }

FiniteSubset FiniteSubset::ball(int d, std::int64_t r) { return cube(d, -r, r + 1); }

bool FiniteSubset::contains(const Site& s) const {
  return std::binary_search(sites_.begin(), sites_.end(), s);
}

std::ptrdiff_t FiniteSubset::index_of(const Site& s) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
  if (it == sites_.end() || !(*it == s)) return -1;
  return it - sites_.begin();
}

FiniteSubset FiniteSubset::translate(const Site& g) const {
  std::vector<Site> out;
  out.reserve(sites_.size());
  for (const auto& s : sites_) out.push_back(s + g);
  FiniteSubset r(std::move(out));
  r.dim_ = dim_;
  return r;
}

FiniteSubset FiniteSubset::inverse() const {
  std::vector<Site> out;
  out.reserve(sites_.size());
  for (const auto& s : sites_) out.push_back(-s);
  FiniteSubset r(std::move(out));
  r.dim_ = dim_;
  return r;
}

FiniteSubset FiniteSubset::unite(const FiniteSubset& o) const {
  std::vector<Site> out;
  std::set_union(sites_.begin(), sites_.end(), o.sites_.begin(), o.sites_.end(), std::back_inserter(out));
  FiniteSubset r;
  r.sites_ = std::move(out);
  r.dim_ = empty() ? o.dim_ : dim_;
  return r;
}

FiniteSubset FiniteSubset::intersect(const FiniteSubset& o) const {
  std::vector<Site> out;
  std::set_intersection(sites_.begin(), sites_.end(), o.sites_.begin(), o.sites_.end(),
                        std::back_inserter(out));
  FiniteSubset r;
  r.sites_ = std::move(out);
  r.dim_ = dim_;
  return r;
}

FiniteSubset FiniteSubset::minus(const FiniteSubset& o) const {
  std::vector<Site> out;
  std::set_difference(sites_.begin(), sites_.end(), o.sites_.begin(), o.sites_.end(),
                      std::back_inserter(out));
  FiniteSubset r;
  r.sites_ = std::move(out);
  r.dim_ = dim_;
  return r;
}

FiniteSubset FiniteSubset::sum(const FiniteSubset& o) const {
  std::vector<Site> out;
  out.reserve(sites_.size() * o.sites_.size());
  for (const auto& a : sites_)
    for (const auto& b : o.sites_) out.push_back(a + b);
  FiniteSubset r(std::move(out));
  r.dim_ = dim_;
  return r;
}

std::size_t FiniteSubset::symmetric_difference_size(const FiniteSubset& o) const {
  const std::size_t common = intersect(o).size();
  return size() + o.size() - 2 * common;
}

bool FiniteSubset::is_subset_of(const FiniteSubset& o) const {
  return std::includes(o.sites_.begin(), o.sites_.end(), sites_.begin(), sites_.end());
}

bool FiniteSubset::is_interval() const {
  if (dim_ != 1 || sites_.empty()) return false;
  return sites_.back()[0] - sites_.front()[0] + 1 == static_cast<std::int64_t>(sites_.size());
}

std::pair<Site, Site> FiniteSubset::bounds() const {
  if (sites_.empty()) fail("folner/empty", "bounds of empty set");
  Site lo = sites_.front(), hi = sites_.front();
  for (const auto& s : sites_)
    for (int i = 0; i < dim_; ++i) {
      lo[i] = std::min(lo[i], s[i]);
      hi[i] = std::max(hi[i], s[i]);
    }
  return {lo, hi};
}

// ---------------------------------------------------------------------------

FolnerSchedule FolnerSchedule::boxes(int d, std::size_t count) {
  if (count == 0) fail("folner/empty", "schedule needs at least one set");
  FolnerSchedule s;
  s.kind_ = Kind::boxes;
  s.dim_ = d;
  s.sets_.reserve(count);
  for (std::size_t n = 1; n <= count; ++n) s.sets_.push_back(FiniteSubset::box(d, static_cast<std::int64_t>(n)));
  return s;
}

FolnerSchedule FolnerSchedule::custom(std::vector<FiniteSubset> sets) {
  if (sets.empty()) fail("folner/empty", "schedule needs at least one set");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].empty()) fail("folner/empty", "F_" + std::to_string(i + 1) + " is empty");
    if (sets[i].dim() != sets.front().dim()) fail("folner/dimension", "mixed dimensions in schedule");
    if (i > 0 && sets[i].size() < sets[i - 1].size())
      fail("folner/cardinality", "|F_" + std::to_string(i + 1) + "| < |F_" + std::to_string(i) + "|");
  }
  FolnerSchedule s;
  s.kind_ = Kind::custom;
  s.dim_ = sets.front().dim();
  s.sets_ = std::move(sets);
  return s;
}

const FiniteSubset& FolnerSchedule::at(std::size_t n) const {
  if (n < 1 || n > sets_.size())
    fail("folner/index", "F_" + std::to_string(n) + " outside schedule of length " + std::to_string(sets_.size()));
  return sets_[n - 1];
}

// ---------------------------------------------------------------------------

Rational invariance_ratio(const FiniteSubset& F, const Site& g) {
  if (F.empty()) fail("folner/empty", "F must be nonempty");
  return {static_cast<std::int64_t>(F.symmetric_difference_size(F.translate(g))),
          static_cast<std::int64_t>(F.size())};
}

bool is_kdelta_invariant(const FiniteSubset& F, const FiniteSubset& K, double delta) {
  if (!(delta > 0)) fail("folner/delta", "delta must be positive");
  if (F.empty() || K.empty()) fail("folner/empty", "F and K must be nonempty");
  // Only g with K+g meeting F can qualify: g = f - k.
  const FiniteSubset candidates = F.sum(K.inverse());
  std::size_t boundary = 0;
  for (const auto& g : candidates) {
    bool outside = false;
    for (const auto& k : K)
      if (!F.contains(k + g)) {
        outside = true;
        break;
      }
    if (outside) ++boundary;
  }
  return static_cast<double>(boundary) / static_cast<double>(F.size()) < delta;
}

Rational tempered_prefix_constant(const FolnerSchedule& sched, std::size_t N) {
  if (N < 2) fail("folner/prefix", "N must be at least 2");
  if (N > sched.count()) fail("folner/prefix", "N exceeds schedule length");
  // U_{k<n} F_k^{-1} F_n = (U_{k<n} F_k^{-1}) + F_n in an abelian group.
  FiniteSubset prefix = sched.at(1).inverse();
  Rational best(0, 1);
  for (std::size_t n = 2; n <= N; ++n) {
    const FiniteSubset& Fn = sched.at(n);
    Rational r(static_cast<std::int64_t>(prefix.sum(Fn).size()), static_cast<std::int64_t>(Fn.size()));
    if (r > best) best = r;
    prefix = prefix.unite(Fn.inverse());
  }
  return best;
}

double growth_margin(const FolnerSchedule& sched, std::size_t n) {
  if (n < 2) fail("folner/growth", "n must be at least 2");
  return static_cast<double>(sched.at(n).size()) / std::log(static_cast<double>(n));
}

}  // namespace packp
