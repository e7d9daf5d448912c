#pragma once

// Finite-stage pressure estimators on a subshift with a Folner schedule.
//
// At scale m the radius is eps_m = 0.75 * 2^-m, so every (F_n, eps_m) Bowen
// ball, open or closed, is the cylinder on W_n = F_n + [-m,m]^d. Separated
// and spanning sums are then class sums over W_n-patterns of Z:
//   P_n = sum over classes of exp(sup of f_{F_n} over Z in the class)
//   Q_n = sum over classes of exp(inf of f_{F_n} over X in the class)
// Critical exponents are found from log P_n / log Q_n once per n; the
// bisection on s is arithmetic on those series.

#include <optional>
#include <string>
#include <vector>

#include "packp/folner.hpp"
#include "packp/shiftspace.hpp"

namespace packp {

/// Z inside X.
struct SubsetSpec {
  enum class Kind { whole_space, cylinder_union, point };

  Kind kind = Kind::whole_space;
  std::vector<Pattern> cylinders;
  std::optional<PeriodicPoint> point;

  static SubsetSpec whole_space() { return {}; }
  static SubsetSpec cylinder_union(std::vector<Pattern> cylinders);
  static SubsetSpec single(PeriodicPoint x);

  bool contains(const PeriodicPoint& x) const;
  /// Intersection with one more cylinder (used by depth-D decompositions).
  SubsetSpec restricted(const Pattern& cylinder) const;
  std::string describe() const;
};

struct System {
  Subshift shift;
  FolnerSchedule schedule;
};

struct ScaleParams {
  int m = 0;
  std::size_t n_min = 4;
  std::size_t n_max = 60;
  double s_lo = -5.0;
  double s_hi = 5.0;
  double tol_s = 1e-3;
  /// Support depth of the cylinder decomposition in packing_outer.
  int depth = 0;
  /// Scales in the ratio test; the last `tail` steps ending at n_max.
  std::size_t tail = 5;
  /// Run the greedy mixed-scale packing search (brute-force sized inputs only).
  bool mixed_search = false;

  void validate() const;
};

enum class Verdict { diverges, vanishes, bracketed };
std::string to_string(Verdict v);

struct SeriesPoint {
  std::size_t n;
  std::size_t size;  // |F_n|
  double log_sum;    // log P_n or log Q_n
};

struct PressureEstimate {
  std::string quantity;
  double value = 0;
  Verdict verdict = Verdict::bracketed;
  double bracket_lo = 0;
  double bracket_hi = 0;
  ScaleParams scale;
  /// (|W_n| - |F_n|) log k / |F_n| at the smallest n used.
  double boundary_correction = 0;
  /// max over the range of (1/|F_n|) log P_n, without boundary removal.
  double raw_max = 0;
  std::vector<SeriesPoint> series;
  /// Which restricted family realised the sup/inf.
  std::string restriction;
  /// Set when a mixed-scale packing beat the best single scale by > 1e-9.
  bool mixed_beats_single = false;
  double mixed_gain = 0;
};

/// log P(Z, eps_m, F_n, f).
double log_separated_sum(const System& sys, const SubsetSpec& Z, int m, std::size_t n, const LocalPotential& f);
/// log Q(Z, eps_m, F_n, f).
double log_spanning_sum(const System& sys, const SubsetSpec& Z, int m, std::size_t n, const LocalPotential& f);
/// Same sums for an arbitrary window radius r (r = -1: the whole space is one ball).
double log_separated_sum_radius(const System& sys, const SubsetSpec& Z, std::int64_t r, std::size_t n,
                                const LocalPotential& f);
double log_spanning_sum_radius(const System& sys, const SubsetSpec& Z, std::int64_t r, std::size_t n,
                               const LocalPotential& f);

/// Exponential growth rate of P_n. `value` is the rate over the last `tail`
/// steps (log P_{n_max} - log P_{n_max - tail}) / (|F_{n_max}| - |F_{n_max - tail}|);
/// `raw_max` is the max of (1/|F_n|) log P_n over [n_min, n_max].
PressureEstimate upper_capacity(const System& sys, const SubsetSpec& Z, const LocalPotential& f,
                                const ScaleParams& params);
PressureEstimate upper_capacity_radius(const System& sys, const SubsetSpec& Z, std::int64_t r,
                                       const LocalPotential& f, const ScaleParams& params);

struct PremeasureValue {
  double log_value;  // log sup_n A_n(s), may be +inf
  Verdict verdict;
};

/// Single-scale packing sums A_n(s) = exp(-s|F_n|) P_n, sup over n in [N, n_max].
PremeasureValue packing_premeasure(const System& sys, const SubsetSpec& Z, const LocalPotential& f, double s,
                                   const ScaleParams& params);

/// Sum of premeasures over the depth-D cylinder pieces of Z.
PremeasureValue packing_outer(const System& sys, const SubsetSpec& Z, const LocalPotential& f, double s,
                              const ScaleParams& params);

/// sup{s : outer packing sums diverge} by bisection.
PressureEstimate packing_pressure(const System& sys, const SubsetSpec& Z, const LocalPotential& f,
                                  const ScaleParams& params);

/// Same bisection over an explicit family of pieces whose union is the set of interest.
PressureEstimate packing_pressure_pieces(const System& sys, const std::vector<SubsetSpec>& pieces,
                                         const LocalPotential& f, const ScaleParams& params);

/// Critical exponent of single-scale covers B_n(s) = exp(-s|F_n|) Q_n.
PressureEstimate bowen_pressure(const System& sys, const SubsetSpec& Z, const LocalPotential& f,
                                const ScaleParams& params);

/// The same estimators on a precomputed series of log P_n (n consecutive,
/// covering [min(n_min, n_max - tail), n_max]).
PressureEstimate packing_from_series(const std::vector<SeriesPoint>& series, const ScaleParams& params);
PressureEstimate capacity_from_series(const std::vector<SeriesPoint>& series, const ScaleParams& params);

// ---------------------------------------------------------------------------

/// Greedy packing that starts from the best single scale and adds disjoint
/// closed balls of other scales.
struct MixedScaleResult {
  double log_single = 0;
  double log_mixed = 0;
  std::size_t best_scale = 0;
  std::size_t added = 0;
};
MixedScaleResult mixed_scale_search(const System& sys, const SubsetSpec& Z, const LocalPotential& f, double s,
                                    const ScaleParams& params);

/// Depth-D partition of Z and, per piece, the upper capacity rate at radius 3 eps_m.
struct CoverPiece {
  Pattern cylinder;
  double upper_capacity_3eps;
};
struct CoverWitness {
  double packing;  // packing estimate of Z at eps_m
  std::vector<CoverPiece> pieces;
  double sup_pieces;
  double delta;
  bool holds;  // packing + delta >= sup_pieces
};
CoverWitness cover_refinement_witness(const System& sys, const SubsetSpec& Z, const LocalPotential& f,
                                      const ScaleParams& params, double delta);

/// Cylinders of support depth D (d = 1: [0,D), d = 2: [0,D)^2) meeting Z.
std::vector<Pattern> depth_cylinders(const Subshift& X, const SubsetSpec& Z, int depth);

// ---------------------------------------------------------------------------

struct BowenBall {
  PeriodicPoint center;
  FiniteSubset F;
  double radius;
  bool closed = true;
};

struct VitaliResult {
  std::vector<std::size_t> selected;
  bool disjoint = true;
  /// Every input ball lies inside the 5r-dilation of a selected ball.
  bool coverage_ok = true;
};

/// Greedy by non-increasing radius, keeping a ball iff it is disjoint from
/// everything already kept. Balls are cylinders, disjoint iff their patterns
/// conflict on a common site.
VitaliResult vitali_5r(const std::vector<BowenBall>& balls);

}  // namespace packp
