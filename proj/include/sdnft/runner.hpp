// Executes one scenario end to end and collects its measurements.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdnft/bfd.hpp"
#include "sdnft/controller.hpp"
#include "sdnft/dash.hpp"
#include "sdnft/scenario.hpp"
#include "sdnft/traffic.hpp"

namespace sdnft {

struct SeriesRow {
  SimTime t;
  std::string metric;
  std::string entity;
  double value = 0;
};

struct QoeRow {
  std::string client;
  QoeSample sample;
};

struct FlowResult {
  std::string id;
  FlowStats stats;
  std::optional<double> loss;
  std::optional<SimTime> recovery_gap;
};

struct ClientResult {
  std::string id;
  std::vector<QoeSample> samples;
  std::vector<BufferSample> buffer;
  std::vector<std::pair<SimTime, SimTime>> stalls;
  uint64_t stall_count = 0;
  SimTime stall_time;
};

struct RunResult {
  std::string case_name;
  uint64_t seed = 0;
  ScenarioConfig config;
  std::vector<SeriesRow> series;
  std::vector<QoeRow> qoe;
  std::vector<FlowResult> flows;
  std::vector<ClientResult> clients;
  std::optional<QoeReport> qoe_report;
  std::vector<RerouteRecord> reroutes;
  std::vector<BfdTransition> bfd_transitions;
  std::vector<std::pair<SimTime, LinkId>> lldp_failures;
  NetworkCounters network;
  ControllerStats controller;
  uint64_t events = 0;
  uint64_t dash_retransmissions = 0;
  // BFD control and echo packets lost in link queues or on cut links.
  uint64_t bfd_packets_dropped = 0;
  // First injected failure, if any.
  std::optional<SimTime> failure_at;
  // Conservation checks that failed; empty for a valid run.
  std::vector<std::string> violations;

  const FlowResult* flow(const std::string& id) const;
  // The scenario's measured flow (or the first CBR flow).
  const FlowResult* measured_flow() const;
};

RunResult run_scenario(const ScenarioConfig& config, const std::string& case_name = "");

}  // namespace sdnft
