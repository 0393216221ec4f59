// Experiment presets: named sweeps of fully specified scenarios.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdnft/runner.hpp"
#include "sdnft/scenario.hpp"

namespace sdnft {

struct SweepCase {
  std::string name;
  ScenarioConfig config;
};

// Every case is run once per seed.
struct Sweep {
  std::string preset;
  std::string description;
  std::vector<uint64_t> seeds;
  std::vector<SweepCase> cases;

  size_t run_count() const { return seeds.size() * cases.size(); }
  // Case configuration with the run seed applied.
  ScenarioConfig run_config(size_t case_index, uint64_t seed) const;
};

const std::vector<std::string>& preset_ids();
// Throws ConfigError for an unknown id.
Sweep make_preset(const std::string& id);

Json sweep_to_json(const Sweep& sweep);
Sweep sweep_from_json(const Json& doc, const std::string& origin);
// Location of the checked-in golden copy of a preset.
std::string golden_preset_path(const std::string& id);

using ProgressFn = std::function<void(size_t done, size_t total, const RunResult&)>;

// Runs every (case, seed) pair, using up to `jobs` worker threads. Results
// are ordered case-major then by seed regardless of completion order.
std::vector<RunResult> run_sweep(const Sweep& sweep, unsigned jobs = 1,
                                 const ProgressFn& progress = {});

}  // namespace sdnft
