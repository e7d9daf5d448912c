#pragma once

// JSON forms of every component, the report layout and its validator, and
// an RFC-4180 CSV writer.
//
// Pattern keys in rule tables list the window symbols in site order, one
// character each when k <= 10 ("0110"), comma separated otherwise.

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "packp/factor.hpp"
#include "packp/measure.hpp"

namespace packp::io {

using Json = nlohmann::ordered_json;

Json to_json(const Site& s);
Json to_json(const FiniteSubset& S);
Json to_json(const Pattern& p);
Json to_json(const PeriodicPoint& x);
Json to_json(const FolnerSchedule& s);
Json to_json(const Subshift& X);
Json to_json(const LocalPotential& f);
Json to_json(const Measure& mu);
Json to_json(const SlidingBlockCode& code);
Json to_json(const SubsetSpec& Z);
Json to_json(const ScaleParams& p);

FiniteSubset finite_subset_from_json(const Json& j, int d);
Pattern pattern_from_json(const Json& j, int d);
PeriodicPoint point_from_json(const Json& j, int d);
FolnerSchedule schedule_from_json(const Json& j);
Subshift subshift_from_json(const Json& j);
LocalPotential potential_from_json(const Json& j, int k, int d);
Measure measure_from_json(const Json& j);
SlidingBlockCode code_from_json(const Json& j, const Subshift& source);
SubsetSpec subset_from_json(const Json& j, int d);
ScaleParams scale_from_json(const Json& j);

std::string pattern_key(std::span<const Symbol> symbols, int k);
std::vector<Symbol> parse_pattern_key(const std::string& key, int k, std::size_t length);

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double v);

/// {"value": v, "scale": scale}; non-finite values become null.
Json measured(double value, const Json& scale);

/// Reports: {"schema", "quantity", "config", "results", ...}. Every entry of
/// "results" is an object with "value" and a non-empty "scale"; numbers
/// anywhere outside "config" and those entries are rejected.
inline constexpr const char* kReportSchema = "packp.report.v1";
void validate_report(const Json& report);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

std::string csv_escape(const std::string& field);

}  // namespace packp::io
