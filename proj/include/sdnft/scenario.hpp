// Scenario configuration: the JSON document describing one simulation run,
// with strict validation and fully resolved defaults.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdnft/topology.hpp"

namespace sdnft {

using Json = nlohmann::ordered_json;

struct RunSection {
  uint64_t seed = 1;
  int64_t duration_us = 60'000'000;
};

struct LinkSpec {
  std::string a;
  std::string b;
  uint64_t capacity_bps = 50'000'000;
  int64_t delay_us = 1000;
  uint32_t queue_packets = 100;
};

struct HostSpec {
  std::string name;
  std::string attach;  // switch name
  uint64_t capacity_bps = 1'000'000'000;
  int64_t delay_us = 100;
  uint32_t queue_packets = 100;
};

struct TopologySection {
  std::vector<std::string> switches;
  std::vector<LinkSpec> links;
  std::vector<HostSpec> hosts;
};

struct CongestionSection {
  bool enabled = false;
  double reroute_fraction = 0.5;
  int64_t cooldown_us = 10'000'000;
};

struct ControllerSection {
  std::string strategy = "restoration";
  int64_t compute_time_us = 5000;
  int64_t control_delay_us = 2000;
  int64_t t_qoap_us = 2'000'000;
  // "fixed": the first evaluation happens at t_qoap_phase_us (0 = one period
  // after start). "stratified": repetition r of `t_qoap_phase_strata`
  // (derived from the seed) starts at (r + 0.5) / strata * t_qoap.
  std::string t_qoap_phase_mode = "fixed";
  int64_t t_qoap_phase_us = 0;
  uint32_t t_qoap_phase_strata = 6;
  uint32_t k_max = 8;
  CongestionSection congestion;
};

struct BfdSessionSpec {
  std::string link;
  int64_t t_i_us = 100'000;
  uint32_t m = 2;
  bool enabled = true;
};

struct BfdSection {
  bool jitter = false;
  std::vector<BfdSessionSpec> sessions;
};

struct LldpSection {
  bool enabled = true;
  int64_t update_interval_us = 12'000'000;
  uint32_t detection_factor = 2;
};

struct FailureSpec {
  std::string link;
  std::string mode = "port_down";
  int64_t at_us = 0;
};

struct CbrSpec {
  std::string id;
  std::string src;
  std::string dst;
  uint64_t rate_bps = 0;
  uint32_t packet_bytes = 1470;
  int64_t start_us = 0;
  std::optional<int64_t> stop_us;
  // Pinned flows model unmanaged cross traffic: they follow a fixed
  // shortest path and are never rerouted by the controller.
  bool pinned = false;
};

struct AbrSection {
  double ewma_alpha = 0.3;
  double safety_factor = 0.9;
  uint32_t up_switch_segments = 2;
  int64_t max_buffer_us = 30'000'000;
};

struct TransportSection {
  uint32_t window_packets = 4;
  uint32_t packet_bytes = 1500;
  int64_t initial_rto_us = 200'000;
  int64_t request_timeout_us = 1'000'000;
};

struct DashClientSpec {
  std::string id;
  std::string host;
  int64_t start_us = 0;
  // A uniform random offset in [0, start_jitter_us] is added to start_us.
  int64_t start_jitter_us = 0;
};

struct DashSection {
  std::string server;
  std::string resolution = "1080p";
  int64_t segment_us = 1'000'000;
  int64_t video_length_us = 600'000'000;
  int64_t sample_interval_us = 1'000'000;
  AbrSection abr;
  TransportSection transport;
  std::vector<DashClientSpec> clients;
};

struct MetricsSection {
  int64_t throughput_bin_us = 100'000;
  // CBR flow whose loss and recovery gap are summarised (optional).
  std::string measured_flow;
  // Window after the first failure searched for the recovery gap
  // (0 = until the end of the run).
  int64_t failure_window_us = 0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  RunSection run;
  TopologySection topology;
  ControllerSection controller;
  BfdSection bfd;
  LldpSection lldp;
  std::vector<FailureSpec> failures;
  std::vector<CbrSpec> cbr;
  std::optional<DashSection> dash;
  MetricsSection metrics;
};

// Parses and validates; `origin` (usually the file name) prefixes error
// locations. Unknown keys, unresolved names and out-of-range values raise
// ConfigError naming the JSON location.
ScenarioConfig scenario_from_json(const Json& doc, const std::string& origin = "scenario");
ScenarioConfig load_scenario(const std::string& path);
// Every field, defaults included.
Json scenario_to_json(const ScenarioConfig& config);
void validate_scenario(const ScenarioConfig& config, const std::string& origin = "scenario");

// The six-switch evaluation topology with the given hosts attached.
TopologySection canonical_topology(uint64_t switch_capacity_bps,
                                   const std::vector<HostSpec>& hosts);
Topology build_topology(const TopologySection& section);

}  // namespace sdnft
