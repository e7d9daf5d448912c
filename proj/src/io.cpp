#include "packp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace packp::io {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail("config/type", where + " must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail("config/unknown_key", where + ": unknown key \"" + key + "\"");
  }
}

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail("config/missing", where + ": missing \"" + key + "\"");
  return j.at(key);
}

template <class T>
T value_as(const Json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    fail("config/type", what + " has the wrong type");
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? value_as<T>(j.at(key), where + "." + key) : fallback;
}

std::string kind_of(const Json& j, const std::string& where, const char* fallback = nullptr) {
  if (!j.contains("kind")) {
    if (fallback) return fallback;
    fail("config/missing", where + ": missing \"kind\"");
  }
  return value_as<std::string>(j.at("kind"), where + ".kind");
}

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

Site site_from_json(const Json& j, int d) {
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    fail("config/site", "site must be a list of " + std::to_string(d) + " integers");
  Site s(d);
  for (int i = 0; i < d; ++i) s[i] = value_as<std::int64_t>(j[static_cast<std::size_t>(i)], "site coordinate");
  return s;
}

/// Rule table keyed by pattern strings over `window`, k^|W| entries.
template <class T>
std::vector<T> table_from_json(const Json& j, int k, std::size_t width, const std::string& where) {
  if (!j.is_object()) fail("config/type", where + " must map pattern strings to values");
  const std::size_t total = ipow(static_cast<std::size_t>(k), width);
  std::vector<T> out(total);
  std::vector<bool> seen(total, false);
  for (const auto& [key, v] : j.items()) {
    const auto syms = parse_pattern_key(key, k, width);
    std::size_t c = 0;
    for (std::size_t i = syms.size(); i-- > 0;) c = c * static_cast<std::size_t>(k) + static_cast<std::size_t>(syms[i]);
    if (seen[c]) fail("config/rule", where + ": duplicate key \"" + key + "\"");
    seen[c] = true;
    out[c] = value_as<T>(v, where + "[" + key + "]");
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    fail("config/rule", where + ": table needs all " + std::to_string(total) + " patterns");
  return out;
}

template <class T>
Json table_to_json(std::span<const T> rule, int k, std::size_t width) {
  Json out = Json::object();
  std::vector<Symbol> syms(width);
  for (std::size_t c = 0; c < rule.size(); ++c) {
    std::size_t t = c;
    for (auto& s : syms) {
      s = static_cast<Symbol>(t % static_cast<std::size_t>(k));
      t /= static_cast<std::size_t>(k);
    }
    out[pattern_key(syms, k)] = rule[c];
  }
  return out;
}

bool has_number(const Json& j) {
  if (j.is_number()) return true;
  if (j.is_array() || j.is_object())
    for (const auto& v : j)
      if (has_number(v)) return true;
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string pattern_key(std::span<const Symbol> symbols, int k) {
  std::string s;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (k > 10 && i > 0) s += ',';
    s += std::to_string(symbols[i]);
  }
  return s;
}

std::vector<Symbol> parse_pattern_key(const std::string& key, int k, std::size_t length) {
  std::vector<Symbol> out;
  if (k <= 10) {
    for (char c : key) {
      if (c < '0' || c - '0' >= k) fail("config/rule", "bad symbol in pattern key \"" + key + "\"");
      out.push_back(c - '0');
    }
  } else {
    std::size_t pos = 0;
    while (pos <= key.size()) {
      const auto next = std::min(key.find(',', pos), key.size());
      int v = -1;
      const auto [p, ec] = std::from_chars(key.data() + pos, key.data() + next, v);
      if (ec != std::errc() || p != key.data() + next || v < 0 || v >= k)
        fail("config/rule", "bad symbol in pattern key \"" + key + "\"");
      out.push_back(v);
      pos = next + 1;
    }
  }
  if (out.size() != length)
    fail("config/rule", "pattern key \"" + key + "\" must have " + std::to_string(length) + " symbols");
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

Json measured(double value, const Json& scale) {
  Json j;
  j["value"] = std::isfinite(value) ? Json(value) : Json(nullptr);
  j["scale"] = scale;
  return j;
}

// ---------------------------------------------------------------------------

Json to_json(const Site& s) {
  Json j = Json::array();
  for (int i = 0; i < s.dim; ++i) j.push_back(s[i]);
  return j;
}

Json to_json(const FiniteSubset& S) {
  Json j = Json::array();
  for (const auto& s : S) j.push_back(to_json(s));
  return j;
}

Json to_json(const Pattern& p) {
  Json j;
  j["sites"] = to_json(p.support());
  j["symbols"] = Json(std::vector<Symbol>(p.symbols().begin(), p.symbols().end()));
  return j;
}

Json to_json(const PeriodicPoint& x) {
  Json j;
  j["period"] = to_json(x.period());
  j["cells"] = Json(std::vector<Symbol>(x.cells().begin(), x.cells().end()));
  return j;
}

Json to_json(const FolnerSchedule& s) {
  Json j;
  if (s.kind() == FolnerSchedule::Kind::boxes) {
    j["kind"] = "boxes";
    j["d"] = s.dim();
    j["count"] = s.count();
    return j;
  }
  j["kind"] = "custom";
  j["sets"] = Json::array();
  for (std::size_t n = 1; n <= s.count(); ++n) j["sets"].push_back(to_json(s.at(n)));
  return j;
}

Json to_json(const Subshift& X) {
  Json j;
  j["kind"] = "sft";
  j["alphabet"] = X.alphabet();
  j["d"] = X.dim();
  j["forbidden"] = Json::array();
  for (const auto& p : X.forbidden()) j["forbidden"].push_back(to_json(p));
  return j;
}

Json to_json(const LocalPotential& f) {
  Json j;
  j["kind"] = "table";
  j["window"] = to_json(f.window());
  j["rule"] = table_to_json<double>(f.rule(), f.alphabet(), f.window().size());
  return j;
}

Json to_json(const Measure& mu) {
  Json j;
  if (const auto* p = std::get_if<ProductMeasure>(&mu)) {
    j["kind"] = "product";
    j["weights"] = p->weights();
  } else {
    const auto& P = std::get<MarkovMeasure>(mu).transition();
    j["kind"] = "markov";
    j["transition"] = Json::array();
    for (Eigen::Index r = 0; r < P.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < P.cols(); ++c) row.push_back(P(r, c));
      j["transition"].push_back(row);
    }
  }
  return j;
}

Json to_json(const SlidingBlockCode& code) {
  Json j;
  j["kind"] = "table";
  j["target_alphabet"] = code.target_alphabet();
  j["window"] = to_json(code.window());
  j["rule"] = table_to_json<Symbol>(code.rule(), code.source().alphabet(), code.window().size());
  return j;
}

Json to_json(const SubsetSpec& Z) {
  Json j;
  switch (Z.kind) {
    case SubsetSpec::Kind::whole_space:
      j["kind"] = "whole";
      break;
    case SubsetSpec::Kind::cylinder_union:
      j["kind"] = "cylinders";
      j["cylinders"] = Json::array();
      for (const auto& c : Z.cylinders) j["cylinders"].push_back(to_json(c));
      break;
    case SubsetSpec::Kind::point:
      j["kind"] = "point";
      j.update(to_json(*Z.point));
      break;
  }
  return j;
}

Json to_json(const ScaleParams& p) {
  Json j;
  j["m"] = p.m;
  j["n_min"] = p.n_min;
  j["n_max"] = p.n_max;
  j["s_lo"] = p.s_lo;
  j["s_hi"] = p.s_hi;
  j["tol_s"] = p.tol_s;
  j["depth"] = p.depth;
  j["tail"] = p.tail;
  j["mixed_search"] = p.mixed_search;
  return j;
}

// ---------------------------------------------------------------------------

FiniteSubset finite_subset_from_json(const Json& j, int d) {
  if (!j.is_array() || j.empty()) fail("config/set", "finite set must be a non-empty list of sites");
  std::vector<Site> sites;
  for (const auto& s : j) sites.push_back(site_from_json(s, d));
  const std::size_t listed = sites.size();
  FiniteSubset S(std::move(sites));
  if (S.size() != listed) fail("config/set", "finite set lists a site twice");
  return S;
}

Pattern pattern_from_json(const Json& j, int d) {
  if (j.contains("word")) {
    check_keys(j, {"word", "offset"}, "pattern");
    if (d != 1) fail("config/pattern", "\"word\" patterns are one-dimensional");
    const auto w = value_as<std::vector<Symbol>>(j.at("word"), "pattern.word");
    if (w.empty()) fail("config/pattern", "empty word");
    return Pattern::word(std::span<const Symbol>(w), get_or<std::int64_t>(j, "offset", 0, "pattern"));
  }
  check_keys(j, {"sites", "symbols"}, "pattern");
  const Json& sites = need(j, "sites", "pattern");
  const auto syms = value_as<std::vector<Symbol>>(need(j, "symbols", "pattern"), "pattern.symbols");
  if (!sites.is_array() || sites.size() != syms.size() || syms.empty())
    fail("config/pattern", "pattern needs matching non-empty sites and symbols");
  std::vector<std::pair<Site, Symbol>> entries;
  for (std::size_t i = 0; i < syms.size(); ++i) entries.emplace_back(site_from_json(sites[i], d), syms[i]);
  return Pattern::from_pairs(std::move(entries));
}

PeriodicPoint point_from_json(const Json& j, int d) {
  if (j.contains("word")) {
    if (d != 1) fail("config/point", "\"word\" points are one-dimensional");
    return PeriodicPoint::word(value_as<std::vector<Symbol>>(j.at("word"), "point.word"));
  }
  const Site period = site_from_json(need(j, "period", "point"), d);
  return PeriodicPoint(period, value_as<std::vector<Symbol>>(need(j, "cells", "point"), "point.cells"));
}

FolnerSchedule schedule_from_json(const Json& j) {
  const std::string kind = kind_of(j, "schedule");
  if (kind == "boxes") {
    check_keys(j, {"kind", "d", "count"}, "schedule");
    return FolnerSchedule::boxes(get_or<int>(j, "d", 1, "schedule"),
                                 value_as<std::size_t>(need(j, "count", "schedule"), "schedule.count"));
  }
  if (kind == "custom") {
    check_keys(j, {"kind", "d", "sets"}, "schedule");
    const int d = get_or<int>(j, "d", 1, "schedule");
    const Json& sets = need(j, "sets", "schedule");
    if (!sets.is_array()) fail("config/type", "schedule.sets must be a list");
    std::vector<FiniteSubset> out;
    for (const auto& s : sets) out.push_back(finite_subset_from_json(s, d));
    return FolnerSchedule::custom(std::move(out));
  }
  fail("config/schedule", "unknown schedule kind \"" + kind + "\"");
}

Subshift subshift_from_json(const Json& j) {
  const std::string kind = kind_of(j, "shift", "sft");
  if (kind == "full") {
    check_keys(j, {"kind", "alphabet", "d"}, "shift");
    return Subshift::full(value_as<int>(need(j, "alphabet", "shift"), "shift.alphabet"), get_or<int>(j, "d", 1, "shift"));
  }
  if (kind == "golden_mean") {
    check_keys(j, {"kind", "d"}, "shift");
    return Subshift::golden_mean(get_or<int>(j, "d", 1, "shift"));
  }
  if (kind == "sft") {
    check_keys(j, {"kind", "alphabet", "d", "forbidden"}, "shift");
    const int d = get_or<int>(j, "d", 1, "shift");
    std::vector<Pattern> forb;
    if (j.contains("forbidden")) {
      if (!j.at("forbidden").is_array()) fail("config/type", "shift.forbidden must be a list");
      for (const auto& p : j.at("forbidden")) forb.push_back(pattern_from_json(p, d));
    }
    return Subshift(value_as<int>(need(j, "alphabet", "shift"), "shift.alphabet"), d, std::move(forb));
  }
  fail("config/shift", "unknown shift kind \"" + kind + "\"");
}

LocalPotential potential_from_json(const Json& j, int k, int d) {
  const std::string kind = kind_of(j, "potential", "table");
  if (kind == "constant") {
    check_keys(j, {"kind", "c"}, "potential");
    return LocalPotential::constant(k, d, get_or<double>(j, "c", 0.0, "potential"));
  }
  if (kind == "symbol_linear") {
    check_keys(j, {"kind", "t"}, "potential");
    return LocalPotential::symbol_linear(k, d, value_as<double>(need(j, "t", "potential"), "potential.t"));
  }
  if (kind == "table") {
    check_keys(j, {"kind", "window", "rule"}, "potential");
    FiniteSubset W = finite_subset_from_json(need(j, "window", "potential"), d);
    auto rule = table_from_json<double>(need(j, "rule", "potential"), k, W.size(), "potential.rule");
    return LocalPotential(k, std::move(W), std::move(rule));
  }
  fail("config/potential", "unknown potential kind \"" + kind + "\"");
}

Measure measure_from_json(const Json& j) {
  const std::string kind = kind_of(j, "measure");
  if (kind == "bernoulli") {
    check_keys(j, {"kind", "p"}, "measure");
    return ProductMeasure::bernoulli(value_as<double>(need(j, "p", "measure"), "measure.p"));
  }
  if (kind == "product") {
    check_keys(j, {"kind", "weights"}, "measure");
    return ProductMeasure(value_as<std::vector<double>>(need(j, "weights", "measure"), "measure.weights"));
  }
  if (kind == "markov") {
    check_keys(j, {"kind", "transition"}, "measure");
    const auto rows = value_as<std::vector<std::vector<double>>>(need(j, "transition", "measure"), "measure.transition");
    if (rows.empty()) fail("config/measure", "empty transition matrix");
    Eigen::MatrixXd P(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.size()) fail("config/measure", "transition matrix must be square");
      for (std::size_t c = 0; c < rows.size(); ++c)
        P(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return MarkovMeasure(P);
  }
  fail("config/measure", "unknown measure kind \"" + kind + "\"");
}

SlidingBlockCode code_from_json(const Json& j, const Subshift& source) {
  const std::string kind = kind_of(j, "code", "table");
  if (kind == "identity") {
    check_keys(j, {"kind"}, "code");
    return SlidingBlockCode::identity(source);
  }
  if (kind == "constant") {
    check_keys(j, {"kind", "value"}, "code");
    return SlidingBlockCode::constant(source, get_or<Symbol>(j, "value", 0, "code"));
  }
  if (kind == "one_block") {
    check_keys(j, {"kind", "target_alphabet", "map"}, "code");
    return SlidingBlockCode::one_block(source, value_as<int>(need(j, "target_alphabet", "code"), "code.target_alphabet"),
                                       value_as<std::vector<Symbol>>(need(j, "map", "code"), "code.map"));
  }
  if (kind == "table") {
    check_keys(j, {"kind", "target_alphabet", "window", "rule"}, "code");
    FiniteSubset W = finite_subset_from_json(need(j, "window", "code"), source.dim());
    auto rule = table_from_json<Symbol>(need(j, "rule", "code"), source.alphabet(), W.size(), "code.rule");
    return SlidingBlockCode(source, value_as<int>(need(j, "target_alphabet", "code"), "code.target_alphabet"),
                            std::move(W), std::move(rule));
  }
  fail("config/code", "unknown code kind \"" + kind + "\"");
}

SubsetSpec subset_from_json(const Json& j, int d) {
  const std::string kind = kind_of(j, "subset");
  if (kind == "whole") {
    check_keys(j, {"kind"}, "subset");
    return SubsetSpec::whole_space();
  }
  if (kind == "cylinders") {
    check_keys(j, {"kind", "cylinders"}, "subset");
    const Json& cs = need(j, "cylinders", "subset");
    if (!cs.is_array()) fail("config/type", "subset.cylinders must be a list");
    std::vector<Pattern> out;
    for (const auto& c : cs) out.push_back(pattern_from_json(c, d));
    return SubsetSpec::cylinder_union(std::move(out));
  }
  if (kind == "point") {
    check_keys(j, {"kind", "word", "period", "cells"}, "subset");
    return SubsetSpec::single(point_from_json(j, d));
  }
  fail("config/subset", "unknown subset kind \"" + kind + "\"");
}

ScaleParams scale_from_json(const Json& j) {
  check_keys(j, {"m", "n_min", "n_max", "s_lo", "s_hi", "tol_s", "depth", "tail", "mixed_search"}, "scale");
  ScaleParams p;
  p.m = get_or<int>(j, "m", p.m, "scale");
  p.n_min = get_or<std::size_t>(j, "n_min", p.n_min, "scale");
  p.n_max = get_or<std::size_t>(j, "n_max", p.n_max, "scale");
  p.s_lo = get_or<double>(j, "s_lo", p.s_lo, "scale");
  p.s_hi = get_or<double>(j, "s_hi", p.s_hi, "scale");
  p.tol_s = get_or<double>(j, "tol_s", p.tol_s, "scale");
  p.depth = get_or<int>(j, "depth", p.depth, "scale");
  p.tail = get_or<std::size_t>(j, "tail", p.tail, "scale");
  p.mixed_search = get_or<bool>(j, "mixed_search", p.mixed_search, "scale");
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------

void validate_report(const Json& r) {
  const auto bad = [](const std::string& msg) { fail("report/schema", msg); };
  if (!r.is_object()) bad("report must be an object");
  if (!r.contains("schema") || r.at("schema") != kReportSchema) bad("missing or unknown schema tag");
  if (!r.contains("quantity") || !r.at("quantity").is_string()) bad("missing quantity");
  if (!r.contains("results") || !r.at("results").is_object() || r.at("results").empty()) bad("missing results");
  for (const auto& [key, v] : r.items()) {
    if (key == "config" || key == "results") continue;
    if (has_number(v)) bad("bare number under \"" + key + "\"");
  }
  for (const auto& [name, v] : r.at("results").items()) {
    if (!v.is_object()) bad("result \"" + name + "\" must be an object");
    if (!v.contains("value")) bad("result \"" + name + "\" has no value");
    if (!(v.at("value").is_number() || v.at("value").is_null())) bad("result \"" + name + "\" value is not numeric");
    if (!v.contains("scale") || !v.at("scale").is_object() || v.at("scale").empty())
      bad("result \"" + name + "\" lacks scale metadata");
  }
}

// ---------------------------------------------------------------------------

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << "\r\n";
}

}  // namespace packp::io
