#pragma once

// Sums over Bowen-ball classes.
//
// A "class" is a pattern on a window W (a Bowen ball). For each class the
// engine takes the sup (or inf) of the ergodic sum f_F over admissible
// completions on the sites outside W, then returns log sum_c exp(value_c).
// Two routes compute the same quantity:
//   * chain: d = 1, interval window. Sites are eliminated left to right
//     (and right to left from the far end); sup/inf sites lie outside the
//     window so they are eliminated before the summed sites they touch.
//   * brute: exhaustive enumeration of the free sites, any dimension.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "packp/shiftspace.hpp"

namespace packp {

enum class Extremum { max, min };

/// Local log-weight on a list of sites. `table` is indexed by
/// sum_i x_{sites[i]} k^i; -inf marks a forbidden configuration.
struct Factor {
  std::vector<Site> sites;
  std::vector<double> table;
};

struct ClassSumSpec {
  ClassSumSpec(const Subshift& X, FiniteSubset W) : shift(&X), window(std::move(W)) {}

  const Subshift* shift;
  FiniteSubset window;
  /// Translates g of the ergodic sum f_F; ignored without a potential.
  FiniteSubset translates;
  const LocalPotential* potential = nullptr;
  Extremum extremum = Extremum::max;
  /// Configurations must match one of these (none given: no constraint).
  std::vector<Pattern> cylinders;
  /// If set, the extremum runs over the whole subshift, the cylinders only
  /// decide which classes exist (centres of spanning sets may leave Z).
  bool extremum_over_whole_space = false;
  std::optional<Pattern> fixed;
  std::vector<Factor> extra;
  /// Optional membership test on a full region assignment; forces brute.
  std::function<bool(const Pattern&)> predicate;
};

struct ClassValue {
  Pattern pattern;  // class pattern on the window
  double value;     // extremum of f_F over the class
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log of sum over classes of exp(extremum f_F); -inf when no class exists.
double log_class_sum(const ClassSumSpec& spec);

/// Brute-force route only; every class with its value.
std::vector<ClassValue> enumerate_classes(const ClassSumSpec& spec);

enum class ClassSumRoute { chain, brute };
/// Route `log_class_sum` would take.
ClassSumRoute choose_route(const ClassSumSpec& spec);
double log_class_sum_brute(const ClassSumSpec& spec);

/// Upper bound on assignments the brute route will enumerate.
inline constexpr std::size_t kEnumerationBudget = std::size_t{1} << 22;

double log_add(double a, double b);

}  // namespace packp
