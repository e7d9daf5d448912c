#pragma once

// Experiment configs, single runs and sweeps behind the command line tool.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "packp/io.hpp"

namespace packp {

struct Experiment {
  std::string quantity;
  io::Json config;  // as given, with the effective seed filled in

  std::optional<Subshift> shift;
  std::optional<FolnerSchedule> schedule;
  std::optional<LocalPotential> potential;
  SubsetSpec subset;
  std::optional<Measure> measure;
  std::optional<SlidingBlockCode> code;
  ScaleParams scale;

  std::optional<std::uint64_t> seed;
  std::size_t samples = 200;
  double eta = 0.1;
  std::optional<FiniteSubset> V;
  std::optional<std::size_t> n;
  double delta = 0.1;
  int cylinder_depth = 8;
  std::size_t mc_tail = 10;
  std::optional<std::size_t> N;

  std::string sweep_axis;
  std::vector<double> sweep_values;
  bool has_sweep = false;
};

const std::vector<std::string>& known_quantities();

/// Parses and validates every component present in the config.
Experiment parse_experiment(const io::Json& config, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Headline numbers of one run, used for sweep rows.
struct RunSummary {
  double estimate = 0;
  std::string verdict;
  std::optional<double> bracket_lo, bracket_hi, standard_error, boundary_correction;
  int m = 0;
  std::size_t n_min = 0, n_max = 0;
};

struct RunOutput {
  io::Json report;
  std::string table_name;  // CSV file name; empty when there is no table
  std::vector<std::string> table_header;
  std::vector<std::vector<std::string>> table_rows;
  RunSummary summary;
};

RunOutput run_experiment(const Experiment& e, unsigned threads = 1);

struct SweepRow {
  double axis_value;
  std::optional<RunSummary> summary;
  std::string error;  // diagnostic code and message when the run failed
};

/// Config with `axis` set to `value`: m, n_max (or n for fixed-n quantities), eta, delta.
io::Json with_axis(const io::Json& config, const std::string& axis, double value);

/// One run per value; rows come back in value order whatever the thread count.
std::vector<SweepRow> run_sweep(const Experiment& e, unsigned threads = 1);

std::vector<std::string> sweep_header();
std::vector<std::string> sweep_fields(const std::string& axis, const std::string& quantity, const SweepRow& row);

}  // namespace packp
