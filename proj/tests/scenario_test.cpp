#include "sdnft/scenario.hpp"

#include <gtest/gtest.h>

#include "sdnft/errors.hpp"
#include "sdnft/runner.hpp"

namespace sdnft {
namespace {

Json minimal() {
  return Json::parse(R"({
    "name": "two_switches",
    "run": {"seed": 3, "duration_us": 2000000},
    "topology": {
      "switches": ["S1", "S2"],
      "links": [{"a": "S1", "b": "S2"}],
      "hosts": [{"name": "h1", "attach": "S1"}, {"name": "h2", "attach": "S2"}]
    },
    "cbr": [{"id": "f", "src": "h1", "dst": "h2", "rate_bps": 10000000}],
    "metrics": {"measured_flow": "f"}
  })");
}

std::string error_of(const Json& doc) {
  try {
    scenario_from_json(doc, "test.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ScenarioTest, MinimalScenarioParsesWithDefaultsAndRuns) {
  const ScenarioConfig c = scenario_from_json(minimal(), "test.json");
  EXPECT_EQ(c.run.seed, 3u);
  EXPECT_EQ(c.topology.links[0].capacity_bps, 50'000'000u);
  EXPECT_EQ(c.topology.links[0].queue_packets, 100u);
  EXPECT_EQ(c.controller.strategy, "restoration");
  EXPECT_EQ(c.controller.compute_time_us, 5000);
  EXPECT_EQ(c.controller.control_delay_us, 2000);
  const RunResult r = run_scenario(c, "smoke");
  EXPECT_TRUE(r.violations.empty());
  const FlowResult* f = r.measured_flow();
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->loss, 0.0);
  EXPECT_GT(f->stats.received(), 1500u);
}

TEST(ScenarioTest, UnknownKeysAreReportedWithTheirLocation) {
  Json doc = minimal();
  doc["controller"] = {{"strategy", "restoration"}, {"bogus", 1}};
  EXPECT_EQ(error_of(doc), "test.json:/controller/bogus: unknown key");
  doc = minimal();
  doc["extra"] = true;
  EXPECT_EQ(error_of(doc), "test.json:/extra: unknown key");
}

TEST(ScenarioTest, UndefinedReferencesAreNamed) {
  Json doc = minimal();
  doc["bfd"] = {{"sessions", Json::array({{{"link", "S1-S9"}}})}};
  const std::string err = error_of(doc);
  EXPECT_NE(err.find("/bfd/sessions/0/link"), std::string::npos) << err;
  EXPECT_NE(err.find("S1-S9"), std::string::npos) << err;
  doc = minimal();
  doc["cbr"][0]["dst"] = "nowhere";
  EXPECT_NE(error_of(doc).find("nowhere"), std::string::npos);
}

TEST(ScenarioTest, OutOfRangeValuesAreRejected) {
  Json doc = minimal();
  doc["cbr"][0]["rate_bps"] = 0;
  EXPECT_NE(error_of(doc), "");
  doc = minimal();
  doc["topology"]["links"][0]["capacity_bps"] = -5;
  EXPECT_NE(error_of(doc).find("/topology/links/0/capacity_bps"), std::string::npos);
  doc = minimal();
  doc["controller"] = {{"strategy", "magic"}};
  EXPECT_NE(error_of(doc).find("/controller/strategy"), std::string::npos);
  doc = minimal();
  doc["failures"] = Json::array({{{"link", "S1-S2"}, {"mode", "melt"}, {"at_us", 1}}});
  EXPECT_NE(error_of(doc).find("/failures/0/mode"), std::string::npos);
  doc = minimal();
  doc.erase("topology");
  EXPECT_EQ(error_of(doc), "test.json:/topology: missing required key");
}

TEST(ScenarioTest, SerializationRoundTripsEveryField) {
  Json doc = minimal();
  doc["bfd"] = {{"sessions", Json::array({{{"link", "S1-S2"}, {"t_i_us", 5000}}})}};
  doc["failures"] = Json::array({{{"link", "S1-S2"}, {"at_us", 1000000}}});
  const ScenarioConfig c = scenario_from_json(doc, "test.json");
  const Json once = scenario_to_json(c);
  const Json twice = scenario_to_json(scenario_from_json(once, "again"));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(once["bfd"]["sessions"][0]["t_i_us"], 5000);
}

TEST(ScenarioTest, CanonicalTopologyBuilds) {
  const TopologySection t = canonical_topology(
      50'000'000, {HostSpec{"h1", "S1"}, HostSpec{"h6", "S6"}});
  const Topology topo = build_topology(t);
  EXPECT_EQ(topo.switches().size(), 6u);
  EXPECT_EQ(topo.hosts().size(), 2u);
  EXPECT_EQ(topo.links().size(), 9u);
}

}  // namespace
}  // namespace sdnft
