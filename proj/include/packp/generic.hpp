#pragma once

// Empirical measures along Folner sets, frequency neighbourhoods, the
// restricted partition sums over X_{F_n,C}, Brin-Katok local entropy,
// mistake Bowen balls and almost-specification witnesses.

#include <optional>
#include <string>
#include <vector>

#include "packp/measure.hpp"

namespace packp {

/// Frequencies of V-patterns read at g + V for g in F. Index = sum_i x_{g+v_i} k^i.
struct EmpiricalMeasure {
  FiniteSubset V;
  int alphabet = 2;
  std::vector<double> frequency;
};

EmpiricalMeasure empirical_measure(const PeriodicPoint& x, int alphabet, const FiniteSubset& F, const FiniteSubset& V);

/// {nu : |nu[P] - center[P]| <= eta for every V-pattern P}.
struct FrequencyNeighborhood {
  FiniteSubset V;
  int alphabet = 2;
  std::vector<double> center;
  double eta = 0.1;

  static FrequencyNeighborhood around(const Measure& mu, FiniteSubset V, double eta);
  bool contains(const EmpiricalMeasure& e) const;
};

bool in_XFC(const PeriodicPoint& x, const FolnerSchedule& sched, std::size_t n, const FrequencyNeighborhood& C);

/// Membership in every X_{F_n,C} for N < n <= n_max (truncation of R_{N,m}).
bool in_RNm(const PeriodicPoint& x, const FolnerSchedule& sched, std::size_t N, std::size_t n_max,
            const FrequencyNeighborhood& C);

struct Lemma51Result {
  double log_sum = 0;
  double rate = 0;  // log_sum / |F_n|
  std::string route;
};

/// log P(X_{F_n,C}, eps_m, F_n, f): separated sum over classes whose
/// frequencies along F_n lie in C. Needs V and W(f) inside [-m,m]^d.
Lemma51Result lemma51_sum(const System& sys, const FrequencyNeighborhood& C, std::size_t n, int m,
                          const LocalPotential& f);

struct BrinKatokRecord {
  double tail_max = 0;
  double tail_min = 0;
  std::vector<double> series;  // -log mu(B_{F_n}(x, 2^-m)) / |F_n| over the tail
};

/// Local entropy on open balls over n in [n_max - tail + 1, n_max].
BrinKatokRecord brin_katok_local(const Measure& mu, const PeriodicPoint& x, const FolnerSchedule& sched, int m,
                                 std::size_t n_max, std::size_t tail);

/// Mean of the local entropy at n over sampled points, reference h_mu.
MonteCarloEstimate brin_katok_sampled(const Measure& mu, const FolnerSchedule& sched, std::size_t n, int m,
                                      std::size_t sample_count, std::uint64_t seed, unsigned threads = 1);

/// Mistake density g on a grid of radii.
class MistakeBallSpec {
 public:
  MistakeBallSpec(std::vector<double> eps_grid, std::vector<double> g_values);
  static MistakeBallSpec constant(std::vector<double> eps_grid, double g);

  double at(double eps) const;
  const std::vector<double>& grid() const { return eps_; }

 private:
  std::vector<double> eps_;
  std::vector<double> g_;
};

/// Number of h in F with d(hx, hy) > eps.
std::size_t mistake_count(const FiniteSubset& F, const PeriodicPoint& x, const PeriodicPoint& y, double eps);

/// y in B(g; F, x, eps): mistake_count <= g(eps) |F|.
bool mistake_ball_membership(const MistakeBallSpec& spec, const FiniteSubset& F, const PeriodicPoint& x,
                             const PeriodicPoint& y, double eps);

struct OrbitSegment {
  FiniteSubset F;
  PeriodicPoint x;
  double eps;
};

/// A point in every B(g; F_i, x_i, eps_i), or nothing if the bounded search fails.
std::optional<PeriodicPoint> almost_spec_witness(const Subshift& X, const std::vector<OrbitSegment>& segments,
                                                 const MistakeBallSpec& spec);

}  // namespace packp
