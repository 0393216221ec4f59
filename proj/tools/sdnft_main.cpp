// Command-line front end: run a scenario file, run a preset sweep, or list
// the presets. Every flag can also be given through an SDNFT_* variable.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sdnft/errors.hpp"
#include "sdnft/log.hpp"
#include "sdnft/presets.hpp"
#include "sdnft/report.hpp"
#include "sdnft/runner.hpp"
#include "sdnft/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitViolation = 3;

void report_violations(const sdnft::RunResult& run) {
  for (const std::string& v : run.violations) {
    fmt::print(stderr, "invariant violated [{} seed {}]: {}\n", run.case_name, run.seed, v);
  }
}

int cmd_run(const std::string& scenario_path, std::optional<uint64_t> seed,
            std::optional<double> duration_s, const std::string& out_dir) {
  sdnft::ScenarioConfig config = sdnft::load_scenario(scenario_path);
  if (seed) config.run.seed = *seed;
  if (duration_s) {
    if (!(*duration_s > 0)) throw sdnft::ConfigError("--duration must be positive");
    config.run.duration_us = std::llround(*duration_s * 1e6);
  }
  sdnft::validate_scenario(config, scenario_path);
  const sdnft::RunResult run = sdnft::run_scenario(config, config.name);
  for (const std::string& path : sdnft::write_run_csvs(run, out_dir)) {
    fmt::print("wrote {}\n", path);
  }
  if (const sdnft::FlowResult* f = run.measured_flow()) {
    fmt::print("flow {}: sent {} received {} lost {}\n", f->id, f->stats.sent(),
               f->stats.received(), f->stats.lost());
  }
  if (run.qoe_report) {
    fmt::print("qoe: bitrate {:.1f} kb/s, quality {:.4f}, latency {:.1f} ms, switches {:.2f}\n",
               run.qoe_report->avg_bitrate_kbps, run.qoe_report->avg_quality,
               run.qoe_report->avg_latency_us / 1000.0, run.qoe_report->avg_switch_count);
  }
  report_violations(run);
  return run.violations.empty() ? kExitOk : kExitViolation;
}

int cmd_preset(const std::string& id, const std::string& out_dir, bool svg, unsigned jobs,
               std::optional<uint64_t> seed_count, bool dump_config) {
  sdnft::Sweep sweep = sdnft::make_preset(id);
  if (seed_count) {
    if (*seed_count == 0) throw sdnft::ConfigError("--seeds must be at least 1");
    sweep.seeds.resize(std::min<size_t>(sweep.seeds.size(), *seed_count));
  }
  if (dump_config) {
    std::cout << sdnft::sweep_to_json(sweep).dump(2) << "\n";
    return kExitOk;
  }
  const std::string dir = out_dir + "/" + sweep.preset;
  const std::vector<sdnft::RunResult> runs = sdnft::run_sweep(
      sweep, jobs, [](size_t done, size_t total, const sdnft::RunResult& r) {
        fmt::print(stderr, "[{}/{}] {} seed {}\n", done, total, r.case_name, r.seed);
      });
  sdnft::write_sweep_outputs(sweep, runs, dir, svg);
  fmt::print("wrote {}/summary.csv ({} runs)\n", dir, runs.size());
  bool ok = true;
  for (const sdnft::RunResult& r : runs) {
    report_violations(r);
    ok = ok && r.violations.empty();
  }
  return ok ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of SDN data-plane fault tolerance"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "debug, info, warn, error or off")
      ->envname("SDNFT_LOG_LEVEL");

  CLI::App* run = app.add_subcommand("run", "Run one scenario file");
  std::string scenario_path;
  std::optional<uint64_t> seed;
  std::optional<double> duration_s;
  std::string run_out = "out";
  run->add_option("--scenario", scenario_path, "Scenario JSON file")
      ->required()
      ->envname("SDNFT_SCENARIO");
  run->add_option("--seed", seed, "Override the scenario seed")->envname("SDNFT_SEED");
  run->add_option("--duration", duration_s, "Override the run duration (seconds)")
      ->envname("SDNFT_DURATION");
  run->add_option("--out", run_out, "Output directory")->envname("SDNFT_OUT");

  CLI::App* preset = app.add_subcommand("preset", "Run an experiment preset sweep");
  std::string preset_id;
  std::string preset_out = "out";
  bool svg = false;
  unsigned jobs = 1;
  std::optional<uint64_t> seed_count;
  bool dump_config = false;
  preset->add_option("--id", preset_id, "Preset id (see list-presets)")
      ->required()
      ->envname("SDNFT_ID");
  preset->add_option("--out", preset_out, "Output directory")->envname("SDNFT_OUT");
  preset->add_flag("--svg", svg, "Also write SVG charts")->envname("SDNFT_SVG");
  preset->add_option("--jobs", jobs, "Parallel runs")
      ->check(CLI::PositiveNumber)
      ->envname("SDNFT_JOBS");
  preset->add_option("--seeds", seed_count, "Run only the first N seeds")
      ->envname("SDNFT_SEEDS");
  preset->add_flag("--dump-config", dump_config,
                   "Print the expanded sweep as JSON instead of running it")
      ->envname("SDNFT_DUMP_CONFIG");

  CLI::App* list = app.add_subcommand("list-presets", "List the available presets");

  CLI11_PARSE(app, argc, argv);

  try {
    sdnft::set_log_level(sdnft::parse_log_level(log_level));
    if (*run) return cmd_run(scenario_path, seed, duration_s, run_out);
    if (*preset) return cmd_preset(preset_id, preset_out, svg, jobs, seed_count, dump_config);
    if (*list) {
      for (const std::string& id : sdnft::preset_ids()) {
        const sdnft::Sweep s = sdnft::make_preset(id);
        fmt::print("{:<24} {:>3} cases x {} seeds  {}\n", id, s.cases.size(), s.seeds.size(),
                   s.description);
      }
      return kExitOk;
    }
  } catch (const sdnft::ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return kExitOk;
}
