#pragma once

// Sliding block codes between shift spaces, image pressure, fiber entropy
// and the factor-map inequalities at finite stages.

#include <optional>
#include <string>
#include <vector>

#include "packp/pressure.hpp"

namespace packp {

/// y_h = rule(x restricted to h + W). `rule` is indexed by sum_i x_{h+w_i} k^i.
class SlidingBlockCode {
 public:
  SlidingBlockCode(Subshift source, int target_alphabet, FiniteSubset window, std::vector<Symbol> rule);

  static SlidingBlockCode identity(Subshift source);
  static SlidingBlockCode one_block(Subshift source, int target_alphabet, std::vector<Symbol> map);
  static SlidingBlockCode constant(Subshift source, Symbol value);
  static SlidingBlockCode from_function(Subshift source, int target_alphabet, FiniteSubset window,
                                        const std::function<Symbol(std::span<const Symbol>)>& fn);

  const Subshift& source() const { return source_; }
  int target_alphabet() const { return ky_; }
  const FiniteSubset& window() const { return window_; }
  std::span<const Symbol> rule() const { return rule_; }
  /// Smallest r with W inside [-r,r]^d.
  std::int64_t radius() const;

  Symbol image_at(std::span<const Symbol> window_symbols) const;

 private:
  Subshift source_;
  int ky_;
  FiniteSubset window_;
  std::vector<Symbol> rule_;
};

PeriodicPoint apply_code(const SlidingBlockCode& code, const PeriodicPoint& x);

/// Image of a source pattern on the sites h with h + W inside its support.
Pattern apply_code(const SlidingBlockCode& code, const Pattern& p);

/// f o pi on the source, window W_f + W_pi.
LocalPotential compose(const LocalPotential& f, const SlidingBlockCode& code);

/// log P(pi(E), eps_m, F_n, f) for a potential on the target with W(f) inside [-m,m]^d.
double log_image_separated_sum(const SlidingBlockCode& code, const FolnerSchedule& sched, const SubsetSpec& E,
                               int m, std::size_t n, const LocalPotential& f);

/// Packing pressure of pi(E) from the image partition sums.
PressureEstimate image_pressure(const SlidingBlockCode& code, const FolnerSchedule& sched, const SubsetSpec& E,
                                const LocalPotential& f, const ScaleParams& params);

struct FiberEntropy {
  double value = 0;    // tail growth of max_y log N_n(y)
  double raw_max = 0;  // max over n of max_y log N_n(y) / |F_n|
  std::vector<SeriesPoint> series;  // log_sum = max_y log N_n(y)
  bool lower_bound = false;         // some n used sampled targets
  std::size_t targets_checked = 0;
};

/// N_n(y) = number of source eps_m-classes on F_n + B_m whose image matches y on F_n.
/// Exhaustive over target patterns when there are at most 4096, else 256 sampled.
FiberEntropy fiber_uc_entropy(const SlidingBlockCode& code, const FolnerSchedule& sched, const ScaleParams& params,
                              std::uint64_t seed = 1, unsigned threads = 1);

/// log N_n(u) for one target pattern u on F_n.
double log_fiber_count(const SlidingBlockCode& code, const FiniteSubset& F, int m, const Pattern& u);

struct StageCheck {
  std::size_t n;
  double log_image;   // P(pi(E), eps_m, F_n, f)
  double log_source;  // P(E, eps at radius m + r_pi, F_n, f o pi)
  bool holds;
};

struct Theorem12Report {
  double lhs = 0;    // packing pressure of pi(E)
  double mid = 0;    // packing pressure of E with f o pi
  double rhs = 0;    // lhs + fiber term
  double fiber = 0;
  bool fiber_lower_bound = false;
  double margin_left = 0;   // mid - lhs
  double margin_right = 0;  // rhs - mid
  double tolerance = 0;     // 2 tol_s + boundary correction
  bool left_holds = false;
  bool right_holds = false;
  std::vector<StageCheck> stages;
  bool stages_hold = true;
  /// Upper-capacity chain: UC(E, f o pi) <= UC(pi(E), f) + fiber.
  double uc_source = 0;
  double uc_image = 0;
  bool uc_chain_holds = false;
};

Theorem12Report theorem12_check(const SlidingBlockCode& code, const FolnerSchedule& sched, const SubsetSpec& E,
                                const LocalPotential& f, const ScaleParams& params, std::uint64_t seed = 1,
                                unsigned threads = 1);

struct CoverCount {
  std::size_t l = 0;  // number of source balls in the cover
  double log_l = 0;
  double log_bound = 0;  // (a + 2 tau) |F_n|
  bool within_bound = false;
  bool inclusion_verified = false;
  std::size_t preimage_patterns = 0;
};

/// Cover of pi^{-1}(B_{F_n}(y, eta)) by source balls B_{F_n}(v, eps), eta and eps
/// given as window radii, one ball per preimage class.
CoverCount lemma41_cover_count(const SlidingBlockCode& code, const PeriodicPoint& y, const FiniteSubset& F,
                               std::int64_t eta_radius, std::int64_t eps_radius, double a, double tau);

}  // namespace packp
