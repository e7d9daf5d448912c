#include "packp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "packp/generic.hpp"

namespace packp {

using io::Json;

namespace {

bool is_sampling(const std::string& q) {
  return q == "measure_upper_pressure" || q == "brin_katok" || q == "fiber_entropy" || q == "theorem12_check";
}

bool uses_code(const std::string& q) {
  return q == "image_pressure" || q == "fiber_entropy" || q == "theorem12_check";
}

bool uses_measure(const std::string& q) {
  return q == "measure_upper_pressure" || q == "measure_packing_pressure" || q == "katok_packing_pressure" ||
         q == "lemma51_sum" || q == "brin_katok";
}

bool fixed_n(const std::string& q) { return q == "lemma51_sum" || q == "brin_katok"; }

template <class T>
T read(const Json& j, const char* key, const std::string& what) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail("config/type", what + " has the wrong type");
  }
}

Json scale_json(const ScaleParams& p) {
  Json s;
  s["m"] = p.m;
  s["eps"] = scale_radius(p.m);
  s["n_min"] = p.n_min;
  s["n_max"] = p.n_max;
  s["tail"] = p.tail;
  s["depth"] = p.depth;
  return s;
}

Json series_json(const std::vector<SeriesPoint>& series) {
  Json out = Json::array();
  for (const auto& q : series) out.push_back({{"n", q.n}, {"size", q.size}, {"log_sum", q.log_sum}});
  return out;
}

Json estimate_json(const PressureEstimate& e, bool critical) {
  Json j = io::measured(e.value, scale_json(e.scale));
  j["verdict"] = to_string(e.verdict);
  j["bracket"] = {e.bracket_lo, e.bracket_hi};
  if (critical) {
    j["s_critical"] = e.value;
    j["verdict_series"] = Json::array({{{"s", e.bracket_lo}, {"verdict", "diverges"}},
                                       {{"s", e.bracket_hi}, {"verdict", "vanishes"}}});
  }
  j["boundary_correction"] = e.boundary_correction;
  j["raw_max"] = std::isfinite(e.raw_max) ? Json(e.raw_max) : Json(nullptr);
  j["restriction"] = e.restriction;
  if (e.mixed_beats_single || e.scale.mixed_search) j["mixed_gain"] = e.mixed_gain;
  j["series"] = series_json(e.series);
  return j;
}

void series_table(RunOutput& out, const std::vector<SeriesPoint>& series) {
  out.table_name = "series.csv";
  out.table_header = {"n", "size", "log_sum", "rate"};
  for (const auto& q : series)
    out.table_rows.push_back({std::to_string(q.n), std::to_string(q.size), io::format_number(q.log_sum),
                              io::format_number(q.log_sum / static_cast<double>(q.size))});
}

void sample_table(RunOutput& out, const std::vector<double>& samples, std::size_t n) {
  out.table_name = "samples.csv";
  out.table_header = {"point_id", "n", "local_value"};
  for (std::size_t i = 0; i < samples.size(); ++i)
    out.table_rows.push_back({std::to_string(i), std::to_string(n), io::format_number(samples[i])});
}

RunSummary summary_of(const PressureEstimate& e) {
  RunSummary s;
  s.estimate = e.value;
  s.verdict = to_string(e.verdict);
  s.bracket_lo = e.bracket_lo;
  s.bracket_hi = e.bracket_hi;
  s.boundary_correction = e.boundary_correction;
  s.m = e.scale.m;
  s.n_min = e.scale.n_min;
  s.n_max = e.scale.n_max;
  return s;
}

Json base_report(const Experiment& e) {
  Json r;
  r["schema"] = io::kReportSchema;
  r["quantity"] = e.quantity;
  r["config"] = e.config;
  r["results"] = Json::object();
  r["diagnostics"] = Json::array();
  return r;
}

System system_of(const Experiment& e) { return System{*e.shift, *e.schedule}; }

std::uint64_t seed_of(const Experiment& e) { return *e.seed; }

// ---------------------------------------------------------------------------

RunOutput run_estimator(const Experiment& e) {
  RunOutput out;
  out.report = base_report(e);
  const System sys = system_of(e);
  PressureEstimate est;
  if (e.quantity == "upper_capacity") est = upper_capacity(sys, e.subset, *e.potential, e.scale);
  else if (e.quantity == "packing_pressure") est = packing_pressure(sys, e.subset, *e.potential, e.scale);
  else est = bowen_pressure(sys, e.subset, *e.potential, e.scale);
  out.report["subset"] = e.subset.describe();
  out.report["restriction"] = est.restriction;
  out.report["results"][e.quantity] = estimate_json(est, e.quantity != "upper_capacity");
  if (est.mixed_beats_single) out.report["diagnostics"].push_back("mixed-scale packing beat the best single scale");
  series_table(out, est.series);
  out.summary = summary_of(est);
  return out;
}

RunOutput run_measure_upper(const Experiment& e, unsigned threads) {
  RunOutput out;
  out.report = base_report(e);
  TailParams p;
  p.m = e.scale.m;
  p.n_max = e.scale.n_max;
  p.tail = e.mc_tail;
  p.sample_count = e.samples;
  p.seed = seed_of(e);
  p.threads = threads;
  const auto mc = measure_upper_pressure(*e.measure, *e.potential, *e.schedule, p);
  Json scale = scale_json(e.scale);
  scale["tail"] = e.mc_tail;
  scale["samples"] = e.samples;
  Json j = io::measured(mc.mean, scale);
  j["standard_error"] = mc.standard_error;
  j["reference"] = mc.reference;
  out.report["results"]["measure_upper_pressure"] = j;
  out.report["restriction"] = "mean over sampled points of the tail max of local pressure";
  sample_table(out, mc.samples, e.scale.n_max);
  out.summary.estimate = mc.mean;
  out.summary.verdict = "sampled";
  out.summary.standard_error = mc.standard_error;
  out.summary.m = e.scale.m;
  out.summary.n_min = e.scale.n_max - e.mc_tail + 1;
  out.summary.n_max = e.scale.n_max;
  return out;
}

RunOutput run_measure_packing(const Experiment& e) {
  RunOutput out;
  out.report = base_report(e);
  const System sys = system_of(e);
  const bool katok = e.quantity == "katok_packing_pressure";
  const auto r = katok ? katok_packing_pressure(sys, *e.measure, *e.potential, e.delta, e.cylinder_depth, e.scale)
                       : measure_packing_pressure(sys, *e.measure, *e.potential, e.delta, e.cylinder_depth, e.scale);
  Json j = estimate_json(r.estimate, true);
  j["scale"]["delta"] = e.delta;
  j["scale"]["cylinder_depth"] = e.cylinder_depth;
  j["typical_mass"] = r.typical.mass;
  j["typical_cylinders"] = r.typical.cylinders.size();
  out.report["results"][e.quantity] = j;
  out.report["restriction"] = r.estimate.restriction;
  series_table(out, r.estimate.series);
  out.summary = summary_of(r.estimate);
  return out;
}

RunOutput run_lemma51(const Experiment& e) {
  RunOutput out;
  out.report = base_report(e);
  const System sys = system_of(e);
  const FiniteSubset V = e.V ? *e.V : FiniteSubset::ball(e.schedule->dim(), 0);
  const auto C = FrequencyNeighborhood::around(*e.measure, V, e.eta);
  const std::size_t n = e.n.value_or(e.scale.n_max);
  const auto r = lemma51_sum(sys, C, n, e.scale.m, *e.potential);
  Json scale;
  scale["m"] = e.scale.m;
  scale["eps"] = scale_radius(e.scale.m);
  scale["n"] = n;
  scale["eta"] = e.eta;
  scale["V_size"] = V.size();
  Json j = io::measured(r.rate, scale);
  j["log_sum"] = r.log_sum;
  j["route"] = r.route;
  j["reference"] = entropy_of(*e.measure) + expectation(*e.measure, *e.potential);
  out.report["results"]["lemma51_rate"] = j;
  out.report["restriction"] = "classes with V-frequencies within eta of the measure along F_n";
  out.summary.estimate = r.rate;
  out.summary.verdict = "exact";
  out.summary.m = e.scale.m;
  out.summary.n_min = out.summary.n_max = n;
  return out;
}

RunOutput run_brin_katok(const Experiment& e, unsigned threads) {
  RunOutput out;
  out.report = base_report(e);
  const std::size_t n = e.n.value_or(e.scale.n_max);
  const auto mc = brin_katok_sampled(*e.measure, *e.schedule, n, e.scale.m, e.samples, seed_of(e), threads);
  Json scale;
  scale["m"] = e.scale.m;
  scale["eps"] = scale_radius(e.scale.m);
  scale["n"] = n;
  scale["samples"] = e.samples;
  Json j = io::measured(mc.mean, scale);
  j["standard_error"] = mc.standard_error;
  j["reference"] = mc.reference;
  out.report["results"]["brin_katok"] = j;
  out.report["restriction"] = "open Bowen balls, mean over sampled points";
  sample_table(out, mc.samples, n);
  out.summary.estimate = mc.mean;
  out.summary.verdict = "sampled";
  out.summary.standard_error = mc.standard_error;
  out.summary.m = e.scale.m;
  out.summary.n_min = out.summary.n_max = n;
  return out;
}

RunOutput run_factor(const Experiment& e, unsigned threads) {
  RunOutput out;
  out.report = base_report(e);
  const Json scale = scale_json(e.scale);
  if (e.quantity == "image_pressure") {
    const auto est = image_pressure(*e.code, *e.schedule, e.subset, *e.potential, e.scale);
    out.report["subset"] = e.subset.describe();
    out.report["restriction"] = est.restriction;
    out.report["results"]["image_pressure"] = estimate_json(est, true);
    series_table(out, est.series);
    out.summary = summary_of(est);
    return out;
  }
  if (e.quantity == "fiber_entropy") {
    const auto fib = fiber_uc_entropy(*e.code, *e.schedule, e.scale, seed_of(e), threads);
    Json j = io::measured(fib.value, scale);
    j["raw_max"] = fib.raw_max;
    j["lower_bound"] = fib.lower_bound;
    j["targets_checked"] = fib.targets_checked;
    j["series"] = series_json(fib.series);
    out.report["results"]["fiber_entropy"] = j;
    out.report["restriction"] = "tail growth of the largest fiber count over target patterns";
    if (fib.lower_bound) out.report["diagnostics"].push_back("sampled targets: the sup over y is a lower bound");
    series_table(out, fib.series);
    out.summary.estimate = fib.value;
    out.summary.verdict = fib.lower_bound ? "lower_bound" : "exhaustive";
    out.summary.m = e.scale.m;
    out.summary.n_min = e.scale.n_min;
    out.summary.n_max = e.scale.n_max;
    return out;
  }
  const auto r = theorem12_check(*e.code, *e.schedule, e.subset, *e.potential, e.scale, seed_of(e), threads);
  auto& res = out.report["results"];
  res["lhs"] = io::measured(r.lhs, scale);
  res["mid"] = io::measured(r.mid, scale);
  res["rhs"] = io::measured(r.rhs, scale);
  res["fiber"] = io::measured(r.fiber, scale);
  res["fiber"]["lower_bound"] = r.fiber_lower_bound;
  res["margin_left"] = io::measured(r.margin_left, scale);
  res["margin_left"]["tolerance"] = r.tolerance;
  res["margin_left"]["holds"] = r.left_holds;
  res["margin_right"] = io::measured(r.margin_right, scale);
  res["margin_right"]["tolerance"] = r.tolerance;
  res["margin_right"]["holds"] = r.right_holds;
  Json ss = scale;
  ss["source_radius"] = e.scale.m + e.code->radius();
  res["stage_checks"] = io::measured(static_cast<double>(r.stages.size()), ss);
  res["stage_checks"]["holds"] = r.stages_hold;
  res["uc_source"] = io::measured(r.uc_source, scale);
  res["uc_image"] = io::measured(r.uc_image, scale);
  res["uc_image"]["chain_holds"] = r.uc_chain_holds;
  out.report["subset"] = e.subset.describe();
  out.report["restriction"] = "packing estimates at one scale; fiber term from target patterns";
  if (r.fiber_lower_bound) out.report["diagnostics"].push_back("sampled targets: the fiber term is a lower bound");
  if (!(r.left_holds && r.right_holds && r.stages_hold)) out.report["diagnostics"].push_back("an inequality failed");
  out.table_name = "stages.csv";
  out.table_header = {"n", "log_image", "log_source", "holds"};
  for (const auto& s : r.stages)
    out.table_rows.push_back({std::to_string(s.n), io::format_number(s.log_image), io::format_number(s.log_source),
                              s.holds ? "true" : "false"});
  out.summary.estimate = r.mid;
  out.summary.verdict = r.left_holds && r.right_holds ? "holds" : "fails";
  out.summary.bracket_lo = r.lhs;
  out.summary.bracket_hi = r.rhs;
  out.summary.m = e.scale.m;
  out.summary.n_min = e.scale.n_min;
  out.summary.n_max = e.scale.n_max;
  return out;
}

RunOutput run_folner(const Experiment& e) {
  RunOutput out;
  out.report = base_report(e);
  const auto& sched = *e.schedule;
  const std::size_t N = e.N.value_or(std::min<std::size_t>(sched.count(), 200));
  const Rational c = tempered_prefix_constant(sched, N);
  Json scale;
  scale["N"] = N;
  Json j = io::measured(c.value(), scale);
  j["exact"] = std::to_string(c.num) + "/" + std::to_string(c.den);
  out.report["results"]["tempered_prefix_constant"] = j;
  out.table_name = "growth.csv";
  out.table_header = {"n", "size", "growth_margin"};
  bool increasing = true;
  double prev = -1;
  for (std::size_t n = 2; n <= N; ++n) {
    const double g = growth_margin(sched, n);
    if (n > 3 && g <= prev) increasing = false;
    prev = g;
    out.table_rows.push_back({std::to_string(n), std::to_string(sched.at(n).size()), io::format_number(g)});
  }
  Json gm = io::measured(growth_margin(sched, N), scale);
  gm["increasing_beyond_3"] = increasing;
  out.report["results"]["growth_margin"] = gm;
  out.report["restriction"] = "prefix constant over n <= N; growth margin |F_n| / ln n";
  out.summary.estimate = c.value();
  out.summary.verdict = "exact";
  out.summary.n_min = 2;
  out.summary.n_max = N;
  return out;
}

}  // namespace

const std::vector<std::string>& known_quantities() {
  static const std::vector<std::string> q{
      "upper_capacity",   "packing_pressure", "bowen_pressure", "measure_upper_pressure", "measure_packing_pressure",
      "katok_packing_pressure", "lemma51_sum", "brin_katok",   "image_pressure",          "fiber_entropy",
      "theorem12_check",  "folner_diagnostics"};
  return q;
}

Experiment parse_experiment(const Json& cfg, std::optional<std::uint64_t> seed_override) {
  if (!cfg.is_object()) fail("config/type", "config must be a JSON object");
  static const std::vector<std::string> keys{"quantity", "shift", "schedule", "potential", "subset", "measure",
                                             "code",     "scale", "seed",     "samples",   "eta",    "V",
                                             "n",        "delta", "cylinder_depth", "mc_tail", "N", "sweep"};
  for (const auto& [k, v] : cfg.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail("config/unknown_key", "unknown key \"" + k + "\"");
  Experiment e;
  if (!cfg.contains("quantity")) fail("config/missing", "missing \"quantity\"");
  e.quantity = read<std::string>(cfg, "quantity", "quantity");
  const auto& qs = known_quantities();
  if (std::find(qs.begin(), qs.end(), e.quantity) == qs.end())
    fail("config/quantity", "unknown quantity \"" + e.quantity + "\"");

  if (!cfg.contains("schedule")) fail("config/missing", "missing \"schedule\"");
  e.schedule = io::schedule_from_json(cfg.at("schedule"));
  const int d = e.schedule->dim();
  if (cfg.contains("measure")) e.measure = io::measure_from_json(cfg.at("measure"));
  if (cfg.contains("shift")) e.shift = io::subshift_from_json(cfg.at("shift"));
  else if (e.measure) e.shift = Subshift::full(alphabet_of(*e.measure), d);
  if (e.shift && e.shift->dim() != d) fail("config/dimension", "shift and schedule dimensions differ");
  if (e.measure && e.shift && alphabet_of(*e.measure) != e.shift->alphabet())
    fail("config/alphabet", "measure and shift alphabets differ");
  if (cfg.contains("code")) {
    if (!e.shift) fail("config/missing", "a code needs a source shift");
    e.code = io::code_from_json(cfg.at("code"), *e.shift);
  }
  const bool on_target = uses_code(e.quantity);
  if (on_target && !e.code) fail("config/missing", e.quantity + " needs \"code\"");
  if (uses_measure(e.quantity) && !e.measure) fail("config/missing", e.quantity + " needs \"measure\"");
  if (e.quantity != "folner_diagnostics" && e.quantity != "brin_katok" && !e.shift)
    fail("config/missing", e.quantity + " needs \"shift\"");
  if (e.shift) {
    const int k = on_target ? e.code->target_alphabet() : e.shift->alphabet();
    e.potential = cfg.contains("potential") ? io::potential_from_json(cfg.at("potential"), k, d)
                                            : LocalPotential::constant(k, d, 0.0);
  }
  if (cfg.contains("subset")) e.subset = io::subset_from_json(cfg.at("subset"), d);
  if (cfg.contains("scale")) e.scale = io::scale_from_json(cfg.at("scale"));
  e.scale.validate();
  if (e.scale.n_max > e.schedule->count()) fail("config/scale", "n_max exceeds the schedule length");

  if (cfg.contains("seed")) e.seed = read<std::uint64_t>(cfg, "seed", "seed");
  if (seed_override) e.seed = seed_override;
  if (is_sampling(e.quantity) && !e.seed) fail("config/seed", e.quantity + " samples points and needs a seed");
  if (cfg.contains("samples")) e.samples = read<std::size_t>(cfg, "samples", "samples");
  if (cfg.contains("eta")) e.eta = read<double>(cfg, "eta", "eta");
  if (cfg.contains("V")) e.V = io::finite_subset_from_json(cfg.at("V"), d);
  if (cfg.contains("n")) e.n = read<std::size_t>(cfg, "n", "n");
  if (e.n && (*e.n < 1 || *e.n > e.schedule->count())) fail("config/n", "n outside the schedule");
  if (cfg.contains("delta")) e.delta = read<double>(cfg, "delta", "delta");
  if (cfg.contains("cylinder_depth")) e.cylinder_depth = read<int>(cfg, "cylinder_depth", "cylinder_depth");
  if (cfg.contains("mc_tail")) e.mc_tail = read<std::size_t>(cfg, "mc_tail", "mc_tail");
  if (cfg.contains("N")) e.N = read<std::size_t>(cfg, "N", "N");
  if (cfg.contains("sweep")) {
    const Json& s = cfg.at("sweep");
    if (!s.is_object() || !s.contains("axis") || !s.contains("values"))
      fail("config/sweep", "sweep needs \"axis\" and \"values\"");
    for (const auto& [k, v] : s.items())
      if (k != "axis" && k != "values") fail("config/unknown_key", "sweep: unknown key \"" + k + "\"");
    e.sweep_axis = read<std::string>(s, "axis", "sweep.axis");
    if (e.sweep_axis != "m" && e.sweep_axis != "n_max" && e.sweep_axis != "eta" && e.sweep_axis != "delta")
      fail("config/sweep", "sweep axis must be m, n_max, eta or delta");
    e.sweep_values = read<std::vector<double>>(s, "values", "sweep.values");
    e.has_sweep = true;
  }
  e.config = cfg;
  if (e.seed) e.config["seed"] = *e.seed;
  return e;
}

RunOutput run_experiment(const Experiment& e, unsigned threads) {
  RunOutput out;
  const std::string& q = e.quantity;
  if (q == "upper_capacity" || q == "packing_pressure" || q == "bowen_pressure") out = run_estimator(e);
  else if (q == "measure_upper_pressure") out = run_measure_upper(e, threads);
  else if (q == "measure_packing_pressure" || q == "katok_packing_pressure") out = run_measure_packing(e);
  else if (q == "lemma51_sum") out = run_lemma51(e);
  else if (q == "brin_katok") out = run_brin_katok(e, threads);
  else if (uses_code(q)) out = run_factor(e, threads);
  else out = run_folner(e);
  io::validate_report(out.report);
  return out;
}

Json with_axis(const Json& config, const std::string& axis, double value) {
  Json c = config;
  c.erase("sweep");
  const auto integral = [&]() {
    if (value != std::floor(value) || value < 0) fail("sweep/value", axis + " values must be non-negative integers");
    return static_cast<std::int64_t>(value);
  };
  const std::string q = config.value("quantity", "");
  if (axis == "m") {
    c["scale"]["m"] = integral();
  } else if (axis == "n_max") {
    if (fixed_n(q)) c["n"] = integral();
    else c["scale"]["n_max"] = integral();
  } else if (axis == "eta") {
    c["eta"] = value;
  } else if (axis == "delta") {
    c["delta"] = value;
  } else {
    fail("config/sweep", "sweep axis must be m, n_max, eta or delta");
  }
  return c;
}

std::vector<SweepRow> run_sweep(const Experiment& e, unsigned threads) {
  std::vector<SweepRow> rows(e.sweep_values.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      rows[i].axis_value = e.sweep_values[i];
      try {
        const Experiment ei = parse_experiment(with_axis(e.config, e.sweep_axis, e.sweep_values[i]), e.seed);
        rows[i].summary = run_experiment(ei, 1).summary;
      } catch (const Error& err) {
        rows[i].error = err.what();
      }
    }
  };
  const unsigned T = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, rows.size()))));
  if (T == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < T; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::vector<std::string> sweep_header() {
  return {"axis", "axis_value", "quantity", "estimate", "verdict", "bracket_lo", "bracket_hi", "standard_error",
          "boundary_correction", "m", "eps", "n_min", "n_max", "error"};
}

std::vector<std::string> sweep_fields(const std::string& axis, const std::string& quantity, const SweepRow& row) {
  const auto opt = [](const std::optional<double>& v) { return v ? io::format_number(*v) : std::string(); };
  std::vector<std::string> f{axis, io::format_number(row.axis_value), quantity};
  if (row.summary) {
    const auto& s = *row.summary;
    f.insert(f.end(), {io::format_number(s.estimate), s.verdict, opt(s.bracket_lo), opt(s.bracket_hi),
                       opt(s.standard_error), opt(s.boundary_correction), std::to_string(s.m),
                       io::format_number(scale_radius(s.m)), std::to_string(s.n_min), std::to_string(s.n_max), ""});
  } else {
    f.insert(f.end(), {"", "", "", "", "", "", "", "", "", "", row.error});
  }
  return f;
}

}  // namespace packp
