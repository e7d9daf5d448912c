#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "packp/experiment.hpp"

using namespace packp;
using io::Json;

namespace {

Json full_shift(const std::string& quantity) {
  return {{"quantity", quantity},
          {"shift", {{"kind", "full"}, {"alphabet", 2}, {"d", 1}}},
          {"schedule", {{"kind", "boxes"}, {"d", 1}, {"count", 60}}},
          {"scale", {{"m", 1}, {"n_min", 4}, {"n_max", 30}}}};
}

Json bernoulli(const std::string& quantity) {
  return {{"quantity", quantity},
          {"measure", {{"kind", "bernoulli"}, {"p", 0.3}}},
          {"schedule", {{"kind", "boxes"}, {"d", 1}, {"count", 100}}},
          {"n", 100},
          {"scale", {{"m", 1}, {"n_min", 4}, {"n_max", 60}}}};
}

std::string code_of(const Json& cfg) {
  try {
    parse_experiment(cfg);
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST_CASE("every quantity produces a valid report") {
  std::vector<Json> configs{full_shift("upper_capacity"), full_shift("packing_pressure"), full_shift("bowen_pressure")};
  auto mu = bernoulli("measure_upper_pressure");
  mu["samples"] = 20;
  mu["seed"] = 5;
  mu.erase("n");
  configs.push_back(mu);
  auto mp = bernoulli("measure_packing_pressure");
  mp["scale"]["n_max"] = 20;
  mp["cylinder_depth"] = 4;
  mp.erase("n");
  configs.push_back(mp);
  auto kp = mp;
  kp["quantity"] = "katok_packing_pressure";
  configs.push_back(kp);
  configs.push_back(bernoulli("lemma51_sum"));
  auto bk = bernoulli("brin_katok");
  bk["seed"] = 1;
  bk["samples"] = 20;
  configs.push_back(bk);
  auto code = full_shift("image_pressure");
  code["shift"]["alphabet"] = 4;
  code["code"] = {{"kind", "one_block"}, {"target_alphabet", 2}, {"map", {0, 1, 0, 1}}};
  code["scale"] = {{"m", 0}, {"n_min", 4}, {"n_max", 12}};
  configs.push_back(code);
  code["quantity"] = "fiber_entropy";
  code["seed"] = 2;
  configs.push_back(code);
  code["quantity"] = "theorem12_check";
  configs.push_back(code);
  configs.push_back(Json{{"quantity", "folner_diagnostics"},
                         {"schedule", {{"kind", "boxes"}, {"d", 1}, {"count", 50}}},
                         {"scale", {{"n_max", 50}}}});
  CHECK(configs.size() == known_quantities().size());
  for (const auto& c : configs) {
    CAPTURE(c.dump());
    const auto out = run_experiment(parse_experiment(c));
    CHECK_NOTHROW(io::validate_report(out.report));
    CHECK(out.report.at("quantity") == c.at("quantity"));
    CHECK(std::isfinite(out.summary.estimate));
  }
}

TEST_CASE("packing pressure report on the full 2-shift") {
  const auto out = run_experiment(parse_experiment(full_shift("packing_pressure")));
  CHECK(out.report["results"]["packing_pressure"]["s_critical"].get<double>() == doctest::Approx(std::log(2.0)).epsilon(1e-3));
  CHECK(out.table_name == "series.csv");
  CHECK(out.table_rows.size() == 27);
}

TEST_CASE("config validation codes") {
  auto unknown = full_shift("packing_pressure");
  unknown["colour"] = "red";
  CHECK(code_of(unknown) == "config/unknown_key");
  CHECK(code_of(full_shift("nonsense")) == "config/quantity");
  auto no_seed = bernoulli("brin_katok");
  CHECK(code_of(no_seed) == "config/seed");
  auto too_long = full_shift("upper_capacity");
  too_long["scale"]["n_max"] = 61;
  CHECK(code_of(too_long) == "config/scale");
  auto shrinking = full_shift("upper_capacity");
  shrinking["schedule"] = {{"kind", "custom"}, {"d", 1}, {"sets", Json::parse("[[[0],[1]],[[0]]]")}};
  CHECK(code_of(shrinking) == "folner/cardinality");
  auto mismatch = bernoulli("lemma51_sum");
  mismatch["shift"] = {{"kind", "full"}, {"alphabet", 3}, {"d", 1}};
  CHECK(code_of(mismatch) == "config/alphabet");
}

TEST_CASE("seed override wins over the config seed") {
  auto c = bernoulli("brin_katok");
  c["seed"] = 1;
  c["samples"] = 10;
  const auto e = parse_experiment(c, 9);
  CHECK(*e.seed == 9);
  CHECK(e.config.at("seed") == 9);
}

TEST_CASE("runs are byte-identical under a fixed seed, whatever the thread count") {
  auto c = bernoulli("brin_katok");
  c["seed"] = 3;
  c["samples"] = 40;
  const auto e = parse_experiment(c);
  CHECK(run_experiment(e, 1).report.dump() == run_experiment(e, 4).report.dump());
}

TEST_CASE("with_axis targets") {
  const auto lemma = bernoulli("lemma51_sum");
  CHECK(with_axis(lemma, "n_max", 50).at("n") == 50);
  CHECK(with_axis(full_shift("upper_capacity"), "n_max", 20)["scale"]["n_max"] == 20);
  CHECK(with_axis(full_shift("upper_capacity"), "m", 2)["scale"]["m"] == 2);
  CHECK(with_axis(lemma, "eta", 0.05).at("eta") == 0.05);
  CHECK_THROWS_AS(with_axis(lemma, "m", 1.5), Error);
}

TEST_CASE("sweep of eta decreases toward the type-class oracle") {
  auto c = bernoulli("lemma51_sum");
  c["sweep"] = {{"axis", "eta"}, {"values", {0.2, 0.1, 0.05}}};
  const auto e = parse_experiment(c);
  const auto rows = run_sweep(e, 3);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) REQUIRE(rows[i].summary);
  CHECK(rows[0].summary->estimate > rows[1].summary->estimate);
  CHECK(rows[1].summary->estimate > rows[2].summary->estimate);
  // eta = 0.05: counts 30 +- 5 of 100, plus two free window sites at m = 1
  double lse = -std::numeric_limits<double>::infinity();
  for (int k = 25; k <= 35; ++k) {
    const double t = oracle::log_binomial(100, k);
    lse = std::max(lse, t) + std::log1p(std::exp(-std::abs(lse - t)));
  }
  CHECK(rows[2].summary->estimate == doctest::Approx((lse + 2 * std::log(2.0)) / 100).epsilon(1e-9));
  CHECK(std::abs(rows[2].summary->estimate - oracle::entropy(0.3)) < 0.05);
}

TEST_CASE("sweep rows keep order and carry errors") {
  auto c = full_shift("packing_pressure");
  c["sweep"] = {{"axis", "n_max"}, {"values", {10, 999, 20}}};
  const auto rows = run_sweep(parse_experiment(c), 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].summary);
  CHECK_FALSE(rows[1].summary);
  CHECK(rows[1].error.rfind("config/scale", 0) == 0);
  CHECK(rows[2].summary);
  CHECK(rows[2].axis_value == 20);
  CHECK(sweep_fields("n_max", "packing_pressure", rows[1]).size() == sweep_header().size());
}
