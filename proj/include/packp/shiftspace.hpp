#pragma once

// Subshifts over Z^d with the dyadic metric d(x,y) = 2^-k, k the sup-norm of
// the nearest disagreement. Every Bowen ball is then a cylinder on a window
// F + [-r,r]^d, which turns sup/inf constructions into finite combinatorics.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "packp/folner.hpp"

namespace packp {

using Symbol = int;

struct Alphabet {
  int size = 2;
  explicit Alphabet(int k);
};

/// Symbols assigned on a finite support. Symbols are stored in the sorted
/// order of the support.
class Pattern {
 public:
  Pattern() = default;
  Pattern(FiniteSubset support, std::vector<Symbol> symbols);
  static Pattern from_pairs(std::vector<std::pair<Site, Symbol>> entries);
  /// d = 1 word placed on [offset, offset + |word|).
  static Pattern word(std::span<const Symbol> w, std::int64_t offset = 0);
  static Pattern word(std::initializer_list<Symbol> w, std::int64_t offset = 0);

  const FiniteSubset& support() const { return support_; }
  std::span<const Symbol> symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  int dim() const { return support_.dim(); }

  std::optional<Symbol> at(const Site& s) const;
  Pattern translate(const Site& g) const;
  Pattern restrict_to(const FiniteSubset& sub) const;
  /// Agree on every common site.
  bool compatible(const Pattern& o) const;
  /// Union of two compatible patterns.
  Pattern merge(const Pattern& o) const;
  /// Symbols as a string of digits (alphabets up to 10) in support order.
  std::string to_string() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;

 private:
  FiniteSubset support_;
  std::vector<Symbol> symbols_;
};

/// Shift of finite type given by forbidden patterns (none: full shift).
class Subshift {
 public:
  Subshift(int alphabet, int dim, std::vector<Pattern> forbidden = {});

  static Subshift full(int k, int d = 1);
  /// Forbids "11" horizontally (and vertically for d = 2).
  static Subshift golden_mean(int d = 1);

  int alphabet() const { return k_; }
  int dim() const { return d_; }
  const std::vector<Pattern>& forbidden() const { return forbidden_; }
  bool is_full() const { return forbidden_.empty(); }
  /// Largest sup-norm diameter of a forbidden pattern (0 for full shifts).
  std::int64_t memory() const;

  /// No translate of a forbidden pattern fits inside the support and matches.
  bool admissible(const Pattern& p) const;

 private:
  int k_;
  int d_;
  std::vector<Pattern> forbidden_;
};

/// Configuration with x_{h + p_i e_i} = x_h. (gx)_h = x_{h+g}.
class PeriodicPoint {
 public:
  PeriodicPoint() = default;
  /// `cells` laid out row-major over [0,p_1) x ... x [0,p_d).
  PeriodicPoint(Site period, std::vector<Symbol> cells);
  static PeriodicPoint word(std::vector<Symbol> w);
  static PeriodicPoint constant(int d, Symbol a);

  int dim() const { return period_.dim; }
  const Site& period() const { return period_; }
  std::span<const Symbol> cells() const { return cells_; }

  Symbol at(const Site& h) const;
  PeriodicPoint shifted(const Site& g) const;
  Pattern pattern_on(const FiniteSubset& W) const;
  /// Smallest box [0,L)^d with L a common multiple of all periods of both points.
  static Site joint_period(const PeriodicPoint& a, const PeriodicPoint& b);

  /// Periodic extension admissible on a window of three periods.
  bool admissible_in(const Subshift& X) const;

  friend bool operator==(const PeriodicPoint&, const PeriodicPoint&) = default;

 private:
  std::size_t offset(const Site& h) const;
  Site period_;
  std::vector<Symbol> cells_;
};

/// f(x) = rule(x restricted to window), window containing the origin.
/// Rule entries are indexed by sum_i x_{w_i} k^i over the sorted window.
class LocalPotential {
 public:
  LocalPotential(int alphabet, FiniteSubset window, std::vector<double> rule);

  static LocalPotential constant(int k, int d, double c);
  /// f(x) = t * x_0
  static LocalPotential symbol_linear(int k, int d, double t);
  static LocalPotential from_function(int k, FiniteSubset window,
                                      const std::function<double(std::span<const Symbol>)>& fn);

  int alphabet() const { return k_; }
  const FiniteSubset& window() const { return window_; }
  std::span<const double> rule() const { return rule_; }
  double norm_inf() const;
  LocalPotential plus(double c) const;

  double operator()(const PeriodicPoint& x) const { return at(x, Site::zero(x.dim())); }
  /// f(gx)
  double at(const PeriodicPoint& x, const Site& g) const;
  double of_pattern(std::span<const Symbol> window_symbols) const;

 private:
  int k_;
  FiniteSubset window_;
  std::vector<double> rule_;
};

// ---------------------------------------------------------------------------
// Metric and Bowen balls

/// r with {y : d(x,y) < eps} (or <= eps) = {y : y = x on [-r,r]^d}.
/// r = -1 means the ball is the whole space.
std::int64_t window_radius(double eps, bool closed);

/// Radius used by the estimators at scale m: 0.75 * 2^-m. It is not a metric
/// value, so open and closed balls coincide on the window F + [-m,m]^d.
double scale_radius(int m);

double metric_distance(const PeriodicPoint& x, const PeriodicPoint& y);
double bowen_distance(const PeriodicPoint& x, const PeriodicPoint& y, const FiniteSubset& F);

/// Window W with B_F(x,eps) = [x|_W].
FiniteSubset ball_window(const FiniteSubset& F, double eps, bool closed);
/// F + [-r,r]^d, empty for r < 0.
FiniteSubset window_for_radius(const FiniteSubset& F, std::int64_t r);

// ---------------------------------------------------------------------------
// Potentials along orbits

/// f_F(x) = sum_{g in F} f(gx)
double potential_sum(const LocalPotential& f, const PeriodicPoint& x, const FiniteSubset& F);

/// sup of f_F over the Bowen ball B_F(x,eps) (closed: the closed ball) in X.
double potential_sup_ball(const Subshift& X, const LocalPotential& f, const PeriodicPoint& x,
                          const FiniteSubset& F, double eps, bool closed);

/// sup{|f(x) - f(y)| : d(x,y) <= eps} over all window patterns.
double variation(const LocalPotential& f, double eps);

}  // namespace packp
