#pragma once

// Bernoulli and Markov measures with exact cylinder masses, local pressure,
// and the measure-theoretic packing pressures.

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "packp/pressure.hpp"

namespace packp {

class ProductMeasure {
 public:
  explicit ProductMeasure(std::vector<double> weights);
  static ProductMeasure bernoulli(double p1) { return ProductMeasure({1 - p1, p1}); }

  int alphabet() const { return static_cast<int>(w_.size()); }
  const std::vector<double>& weights() const { return w_; }
  /// Entropy per site in nats.
  double entropy() const;

 private:
  std::vector<double> w_;
};

/// Stationary Markov chain on Z (d = 1 only).
class MarkovMeasure {
 public:
  explicit MarkovMeasure(Eigen::MatrixXd transition);

  int alphabet() const { return static_cast<int>(P_.rows()); }
  const Eigen::MatrixXd& transition() const { return P_; }
  const Eigen::VectorXd& stationary() const { return pi_; }
  double entropy() const;

 private:
  Eigen::MatrixXd P_;
  Eigen::VectorXd pi_;
};

using Measure = std::variant<ProductMeasure, MarkovMeasure>;

int alphabet_of(const Measure& mu);
/// Entropy rate h_mu.
double entropy_of(const Measure& mu);
/// Integral of f.
double expectation(const Measure& mu, const LocalPotential& f);

double cylinder_mass(const Measure& mu, const Pattern& pattern);

/// mu(B_F(x, 2^-m)) with open window F + B_m or closed window F + B_{m-1}.
double ball_mass(const Measure& mu, const PeriodicPoint& x, const FiniteSubset& F, int m, bool closed);

struct LocalPressureSample {
  std::size_t n;
  int m;
  double value;
};

/// (-log mu(B_{F}(x, 2^-m)) + f_F(x)) / |F| on the open ball.
LocalPressureSample local_pressure(const Measure& mu, const LocalPotential& f, const PeriodicPoint& x,
                                   const FolnerSchedule& sched, std::size_t n, int m);

/// Periodic point whose fundamental pattern is drawn from mu on [-m, L - m)
/// (d = 1) or on the box [0,L)^2 (product measures, d = 2).
PeriodicPoint sample_point(const Measure& mu, int d, std::size_t L, int m, std::mt19937_64& rng);
/// Independent stream for sample `index` under `seed`.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

struct MonteCarloEstimate {
  double mean = 0;
  double standard_error = 0;
  double reference = 0;  // h_mu + integral of f
  std::vector<double> samples;
};

struct TailParams {
  int m = 1;
  std::size_t n_max = 60;
  std::size_t tail = 10;
  std::size_t sample_count = 200;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Mean over mu-sampled points of the tail max of local pressure.
MonteCarloEstimate measure_upper_pressure(const Measure& mu, const LocalPotential& f, const FolnerSchedule& sched,
                                          const TailParams& p);

/// Union of the highest-mass depth-D cylinders whose total mass reaches 1 - delta.
struct TypicalSet {
  std::vector<Pattern> cylinders;
  double mass = 0;
};
TypicalSet typical_cylinders(const Measure& mu, const Subshift& X, int depth, double delta);

struct MeasurePackingEstimate {
  PressureEstimate estimate;
  TypicalSet typical;
};

/// Packing pressure of the typical cylinder union.
MeasurePackingEstimate measure_packing_pressure(const System& sys, const Measure& mu, const LocalPotential& f,
                                                double delta, int cylinder_depth, const ScaleParams& params);

/// Critical exponent of sums of packing premeasures over the typical cylinders.
MeasurePackingEstimate katok_packing_pressure(const System& sys, const Measure& mu, const LocalPotential& f,
                                              double delta, int cylinder_depth, const ScaleParams& params);

}  // namespace packp
