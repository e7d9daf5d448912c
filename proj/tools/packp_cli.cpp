// packp: run, sweep, validate and oracle subcommands.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "packp/classsum.hpp"
#include "packp/experiment.hpp"

namespace fs = std::filesystem;
using packp::io::Json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitResource = 3;
constexpr int kExitBracket = 4;
constexpr int kExitSweepRows = 5;

struct Options {
  std::string config;
  std::string report;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

int diagnose(const std::string& code, const std::string& message, int status) {
  Json d;
  d["code"] = code;
  d["message"] = message;
  std::cerr << d.dump() << '\n';
  return status;
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) packp::fail("config/io", "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    packp::fail("config/parse", e.what());
  }
}

fs::path out_dir(const Options& o) {
  std::string dir = o.out;
  if (dir.empty()) {
    const char* env = std::getenv("PACKP_OUT_DIR");
    dir = env ? env : ".";
  }
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) packp::fail_resource("output/io", "cannot write " + path.string());
  f << text;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream s;
  packp::io::CsvWriter csv(s);
  csv.row(header);
  for (const auto& r : rows) csv.row(r);
  write_text(path, s.str());
}

int cmd_run(const Options& o) {
  const auto e = packp::parse_experiment(load_json(o.config), o.seed);
  const auto r = packp::run_experiment(e, o.threads);
  const fs::path dir = out_dir(o);
  write_text(dir / "report.json", r.report.dump(2) + "\n");
  if (!r.table_name.empty()) write_csv(dir / r.table_name, r.table_header, r.table_rows);
  std::cout << (dir / "report.json").string() << '\n';
  return 0;
}

int cmd_sweep(const Options& o) {
  const auto e = packp::parse_experiment(load_json(o.config), o.seed);
  if (!e.has_sweep) packp::fail("config/sweep", "config has no \"sweep\" block");
  const auto rows = packp::run_sweep(e, o.threads);
  std::vector<std::vector<std::string>> fields;
  bool failed = false;
  for (const auto& row : rows) {
    fields.push_back(packp::sweep_fields(e.sweep_axis, e.quantity, row));
    failed = failed || !row.summary;
  }
  const fs::path dir = out_dir(o);
  write_csv(dir / "sweep.csv", packp::sweep_header(), fields);
  std::cout << (dir / "sweep.csv").string() << '\n';
  return failed ? kExitSweepRows : 0;
}

int cmd_validate(const Options& o) {
  if (!o.report.empty()) {
    packp::io::validate_report(load_json(o.report));
  } else {
    if (o.config.empty()) packp::fail("config/missing", "validate needs --config or --report");
    packp::parse_experiment(load_json(o.config), o.seed);
  }
  std::cout << "ok\n";
  return 0;
}

// Separated sums by the routed engine next to plain enumeration, n = n_min..n_max.
int cmd_oracle(const Options& o) {
  const auto e = packp::parse_experiment(load_json(o.config), o.seed);
  if (!e.shift || !e.potential) packp::fail("config/missing", "oracle needs a shift");
  if (e.subset.kind == packp::SubsetSpec::Kind::point) packp::fail("config/subset", "oracle takes whole or cylinders");
  const packp::System sys{*e.shift, *e.schedule};
  const auto r = packp::window_radius(packp::scale_radius(e.scale.m), true);
  std::vector<std::vector<std::string>> rows;
  std::string stop = "n_max";
  for (std::size_t n = e.scale.n_min; n <= e.scale.n_max; ++n) {
    const auto& F = sys.schedule.at(n);
    packp::ClassSumSpec spec(sys.shift, packp::window_for_radius(F, r));
    spec.translates = F;
    spec.potential = &*e.potential;
    spec.cylinders = e.subset.cylinders;
    double brute;
    try {
      brute = packp::log_class_sum_brute(spec);
    } catch (const packp::Error& err) {
      if (err.kind() != packp::Error::Kind::resource) throw;
      stop = "budget at n=" + std::to_string(n);
      break;
    }
    const double routed = packp::log_separated_sum(sys, e.subset, e.scale.m, n, *e.potential);
    rows.push_back({std::to_string(n), std::to_string(F.size()), packp::io::format_number(brute),
                    packp::io::format_number(routed), packp::io::format_number(std::abs(brute - routed))});
  }
  const fs::path dir = out_dir(o);
  write_csv(dir / "oracle.csv", {"n", "size", "log_sum_enumerated", "log_sum_engine", "abs_diff"}, rows);
  std::cout << (dir / "oracle.csv").string() << " (stopped: " << stop << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packing, Bowen and upper-capacity pressure for Z and Z^2 shifts"};
  app.require_subcommand(1);
  Options o;
  const auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "JSON config");
    if (needs_config) c->required();
    sub->add_option("--out", o.out, "output directory (default: $PACKP_OUT_DIR or .)");
    sub->add_option("--seed", o.seed, "seed, overrides the config");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1u, 256u));
  };
  auto* run = app.add_subcommand("run", "run one experiment");
  common(run, true);
  auto* sweep = app.add_subcommand("sweep", "one run per value of the sweep axis");
  common(sweep, true);
  auto* validate = app.add_subcommand("validate", "check a config or a report");
  common(validate, false);
  validate->add_option("--report", o.report, "report JSON to validate");
  auto* oracle = app.add_subcommand("oracle", "brute-force separated sums");
  common(oracle, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*validate) return cmd_validate(o);
    return cmd_oracle(o);
  } catch (const packp::Error& e) {
    const std::string what = e.what();
    const std::string message = what.substr(std::min(what.size(), e.code().size() + 2));
    switch (e.kind()) {
      case packp::Error::Kind::resource:
        return diagnose(e.code(), message, kExitResource);
      case packp::Error::Kind::bracket:
        return diagnose(e.code(), message, kExitBracket);
      default:
        return diagnose(e.code(), message, kExitValidation);
    }
  } catch (const fs::filesystem_error& e) {
    return diagnose("output/io", e.what(), kExitResource);
  }
}
