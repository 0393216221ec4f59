#include "sdnft/presets.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "sdnft/errors.hpp"

namespace sdnft {
namespace {

TEST(PresetsTest, EveryPresetBuildsAndValidates) {
  ASSERT_EQ(preset_ids().size(), 6u);
  for (const std::string& id : preset_ids()) {
    const Sweep s = make_preset(id);
    EXPECT_EQ(s.preset, id);
    EXPECT_FALSE(s.cases.empty()) << id;
    EXPECT_EQ(s.seeds.size(), 6u) << id;
    std::set<std::string> names;
    for (const SweepCase& c : s.cases) {
      EXPECT_TRUE(names.insert(c.name).second) << id << " duplicates " << c.name;
      validate_scenario(c.config, id + "/" + c.name);
    }
  }
  EXPECT_THROW(make_preset("fig99"), ConfigError);
}

TEST(PresetsTest, CongestionFactorialHasEighteenCasesAndOneHundredEightRuns) {
  const Sweep s = make_preset("congestion_factorial");
  EXPECT_EQ(s.cases.size(), 18u);
  EXPECT_EQ(s.run_count(), 108u);
}

TEST(PresetsTest, BfdSweepDerivesTransmitIntervalFromDetectionTime) {
  const Sweep s = make_preset("fig12_bfd_sweep");
  const std::vector<int64_t> td_ms{15, 30, 45, 60, 90};
  ASSERT_EQ(s.cases.size(), td_ms.size());
  for (size_t i = 0; i < td_ms.size(); ++i) {
    ASSERT_FALSE(s.cases[i].config.bfd.sessions.empty());
    for (const BfdSessionSpec& b : s.cases[i].config.bfd.sessions) {
      EXPECT_EQ(b.m, 2u);
      EXPECT_EQ(b.t_i_us * 3, td_ms[i] * 1000);
    }
  }
}

TEST(PresetsTest, RunConfigAppliesTheSeed) {
  const Sweep s = make_preset("fig10_11_failure_modes");
  EXPECT_EQ(s.run_config(0, 5).run.seed, 5u);
  EXPECT_EQ(s.run_config(0, 5).topology.links.size(), s.cases[0].config.topology.links.size());
}

TEST(PresetsTest, JsonRoundTripIsLossless) {
  for (const std::string& id : preset_ids()) {
    const Json once = sweep_to_json(make_preset(id));
    EXPECT_EQ(sweep_to_json(sweep_from_json(once, id)), once) << id;
  }
}

TEST(PresetsTest, MatchesCheckedInGoldenCopies) {
  for (const std::string& id : preset_ids()) {
    std::ifstream in(golden_preset_path(id));
    ASSERT_TRUE(in) << "missing " << golden_preset_path(id);
    const Json golden = Json::parse(in);
    EXPECT_EQ(sweep_to_json(make_preset(id)), golden)
        << id << " differs from its golden copy; regenerate it with "
        << "`sdnft preset --id " << id << " --dump-config` if the change is intended";
  }
}

TEST(PresetsTest, SweepFromJsonIsStrict) {
  Json doc = sweep_to_json(make_preset("fig12_bfd_sweep"));
  doc["surprise"] = 1;
  EXPECT_THROW(sweep_from_json(doc, "x"), ConfigError);
}

TEST(PresetsTest, ParallelSweepMatchesSerialOrderAndContent) {
  Sweep s = make_preset("fig12_bfd_sweep");
  s.seeds = {1, 2};
  s.cases.resize(2);
  const auto serial = run_sweep(s, 1);
  const auto parallel = run_sweep(s, 3);
  ASSERT_EQ(serial.size(), 4u);
  ASSERT_EQ(parallel.size(), 4u);
  for (size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].case_name, s.cases[i / 2].name);
    EXPECT_EQ(serial[i].seed, s.seeds[i % 2]);
    EXPECT_EQ(serial[i].case_name, parallel[i].case_name);
    EXPECT_EQ(serial[i].events, parallel[i].events);
    EXPECT_EQ(serial[i].network.created, parallel[i].network.created);
  }
}

}  // namespace
}  // namespace sdnft
