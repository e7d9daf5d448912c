#pragma once

// Finite subsets of Z^d and Folner box sequences.
//
// The group law is componentwise addition. Everything is written against
// `Site` with a runtime dimension, so Z^3 only needs kMaxDim to grow.

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "packp/error.hpp"

namespace packp {

inline constexpr int kMaxDim = 3;

/// Element of Z^d.
struct Site {
  std::array<std::int64_t, kMaxDim> c{};
  int dim = 1;

  Site() = default;
  explicit Site(int d) : dim(d) {}
  Site(std::initializer_list<std::int64_t> coords);

  static Site zero(int d) { return Site(d); }

  std::int64_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  std::int64_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

  Site operator+(const Site& o) const;
  Site operator-(const Site& o) const;
  Site operator-() const;

  /// sup-norm
  std::int64_t norm_inf() const;

  friend bool operator==(const Site& a, const Site& b) { return a.dim == b.dim && a.c == b.c; }
  friend std::strong_ordering operator<=>(const Site& a, const Site& b);
};

using GroupElement = Site;

/// Exact non-negative rational, always reduced.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);
};

/// Nonempty finite set of sites of one dimension, kept sorted and unique.
class FiniteSubset {
 public:
  FiniteSubset() = default;
  explicit FiniteSubset(std::vector<Site> sites);

  /// [0,n)^d
  static FiniteSubset box(int d, std::int64_t n);
  /// [lo,hi)^d
  static FiniteSubset cube(int d, std::int64_t lo, std::int64_t hi);
  /// [-r,r]^d; r < 0 gives the empty set.
  static FiniteSubset ball(int d, std::int64_t r);

  int dim() const { return dim_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  std::span<const Site> sites() const { return sites_; }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }
  const Site& operator[](std::size_t i) const { return sites_[i]; }

  bool contains(const Site& s) const;
  /// Position of `s` in sorted order, or -1.
  std::ptrdiff_t index_of(const Site& s) const;

  FiniteSubset translate(const Site& g) const;
  FiniteSubset inverse() const;
  FiniteSubset unite(const FiniteSubset& o) const;
  FiniteSubset intersect(const FiniteSubset& o) const;
  FiniteSubset minus(const FiniteSubset& o) const;
  /// Minkowski sum {a + b}.
  FiniteSubset sum(const FiniteSubset& o) const;
  std::size_t symmetric_difference_size(const FiniteSubset& o) const;
  bool is_subset_of(const FiniteSubset& o) const;

  /// True iff d == 1 and the elements form one integer interval.
  bool is_interval() const;
  /// Coordinate-wise bounding box [lo, hi] (inclusive).
  std::pair<Site, Site> bounds() const;

  friend bool operator==(const FiniteSubset&, const FiniteSubset&) = default;

 private:
  std::vector<Site> sites_;
  int dim_ = 1;
};

/// Ordered Folner sets F_1..F_N (1-based access).
class FolnerSchedule {
 public:
  enum class Kind { boxes, custom };

  static FolnerSchedule boxes(int d, std::size_t count);
  /// Rejects sets of decreasing cardinality with code "folner/cardinality".
  static FolnerSchedule custom(std::vector<FiniteSubset> sets);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::size_t count() const { return sets_.size(); }
  const FiniteSubset& at(std::size_t n) const;

 private:
  FolnerSchedule() = default;
  Kind kind_ = Kind::boxes;
  int dim_ = 1;
  std::vector<FiniteSubset> sets_;
};

/// |F △ gF| / |F|
Rational invariance_ratio(const FiniteSubset& F, const Site& g);

/// F is (K,delta)-invariant: |{g : K+g meets F and meets G\F}| / |F| < delta.
bool is_kdelta_invariant(const FiniteSubset& F, const FiniteSubset& K, double delta);

/// max over 2 <= n <= N of |U_{k<n} F_k^{-1} F_n| / |F_n|.
Rational tempered_prefix_constant(const FolnerSchedule& sched, std::size_t N);

/// |F_n| / ln n
double growth_margin(const FolnerSchedule& sched, std::size_t n);

}  // namespace packp
