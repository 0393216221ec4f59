// SDN controller: proactive fast-failover protection, reactive restoration,
// the periodic DPQoAP bucket re-organisation and BFD-driven congestion
// rerouting.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdnft/bfd.hpp"
#include "sdnft/network.hpp"
#include "sdnft/paths.hpp"
#include "sdnft/simulator.hpp"

namespace sdnft {

enum class Strategy : uint8_t { kRestoration, kStaticProtection, kDpqoap };
const char* to_string(Strategy strategy);
Strategy parse_strategy(const std::string& text);

struct CongestionPolicy {
  // When enabled, a BFD Down report is treated as congestion on the
  // direction feeding the detecting switch rather than as a link failure.
  bool enabled = false;
  double reroute_fraction = 0.5;
  SimTime cooldown = SimTime::from_s(10);
};

struct ControllerConfig {
  Strategy strategy = Strategy::kRestoration;
  // Processing time of one path recomputation.
  SimTime compute_time = SimTime::from_ms(5);
  // DPQoAP evaluation period and the time of the first evaluation (zero
  // means one period after start).
  SimTime t_qoap = SimTime::from_s(2);
  SimTime t_qoap_phase = SimTime::zero();
  size_t k_max = kDefaultMaxPaths;
  CongestionPolicy congestion;
};

inline constexpr int kGroupRulePriority = 10;
inline constexpr int kFlowRulePriority = 100;

struct RerouteRecord {
  SimTime at;
  LinkId link;
  int direction = 0;
  size_t candidates = 0;
  std::vector<FlowKey> moved;
};

struct ControllerEvent {
  SimTime at;
  std::string kind;
  std::string entity;
  double value = 0;
};

struct ControllerStats {
  uint64_t restorations = 0;
  uint64_t unroutable = 0;
  uint64_t flow_mods = 0;
  uint64_t group_mods = 0;
  uint64_t dpqoap_evaluations = 0;
  uint64_t bucket_reorders = 0;
};

class Controller : public EventTarget {
 public:
  Controller(Simulator& sim, Network& network, ControlChannel& channel,
             ControllerConfig config);

  const ControllerConfig& config() const { return config_; }

  // Registers a flow before start(). One group id is allocated per
  // (source, destination) host pair. A pinned flow is routed once over its
  // shortest path with per-flow rules and never rerouted.
  void add_flow(const FlowKey& key, bool pinned = false);
  // Installs the initial forwarding state synchronously and starts the DPQoAP
  // timer when that strategy is selected.
  void start();

  // Control-plane inputs, invoked when the message reaches the controller.
  void on_port_status(NodeId sw, PortId port, bool up);
  void on_lldp_link_failed(LinkId link);
  void on_bfd_transition(const BfdTransition& transition);

  // Simple paths between two hosts in the current view.
  std::vector<Path> compute_all_paths(NodeId src_host, NodeId dst_host,
                                      std::optional<size_t> k_max) const;
  // Appends each hop's output port to the switch's bucket list for the group
  // (if missing) and pushes the group to the switch.
  void install_proactive_rules(const Path& path, GroupId group);
  // Marks the link down and recomputes a path for every flow routed over it;
  // rules are pushed after the compute time. Returns the number of flows
  // that could not be rerouted.
  size_t restoration_on_failure(LinkId link);
  // Refreshes link latencies, re-ranks every group's path list and
  // re-organises the bucket lists along each group's primary path.
  void dpqoap_evaluate();
  // Puts the primary path's port first at each switch of `primary` and ranks
  // the remaining buckets by the latency of the best path they lead to.
  // Pushes only lists whose order changed; returns the number pushed.
  size_t organize_bucket_list(GroupId group, const Path& primary);
  // Reroutes the first ceil(fraction * n) flows (in flow-key order) crossing
  // the congested direction onto their best path avoiding the link.
  std::vector<FlowKey> congestion_handler(LinkId link, int direction);
  // Propagation delay plus the current queueing delay of the direction.
  SimTime measure_link_latency(LinkId link, int direction) const;

  const NetworkView& view() const { return view_; }
  NetworkView& mutable_view() { return view_; }
  std::optional<Path> current_path(const FlowKey& key) const;
  std::optional<GroupId> group_of(NodeId src, NodeId dst) const;
  const std::vector<Path>& group_paths(GroupId group) const;
  const std::vector<Bucket>* bucket_list(NodeId sw, GroupId group) const;
  const std::vector<RerouteRecord>& reroutes() const { return reroutes_; }
  const std::vector<ControllerEvent>& events() const { return events_; }
  const ControllerStats& stats() const { return stats_; }

  void on_event(const Event& event) override;

 private:
  struct GroupState {
    GroupId id;
    NodeId src;
    NodeId dst;
    std::vector<Path> paths;
    std::optional<Path> primary;
  };
  struct FlowEntry {
    bool pinned = false;
    GroupId group;
    // Exact per-flow route (restoration, or a congestion reroute).
    std::optional<Path> path;
  };

  void handle_link_down(LinkId link, const char* source);
  void reroute_flow(const FlowKey& key, const Path& path, SimTime send_time);
  SimTime reserve_compute();
  void push_rule(NodeId sw, const FlowRule& rule, SimTime send_time);
  void push_rule_removal(NodeId sw, const FlowMatch& match, int priority,
                         SimTime send_time);
  void push_group(NodeId sw, const GroupEntry& group, SimTime send_time);
  void record(const std::string& kind, const std::string& entity, double value);

  Simulator& sim_;
  Network& network_;
  ControlChannel& channel_;
  ControllerConfig config_;
  NetworkView view_;
  std::map<FlowKey, FlowEntry> flows_;
  std::vector<GroupState> groups_;  // indexed by group id - 1
  std::map<std::pair<NodeId, NodeId>, GroupId> group_by_pair_;
  std::map<std::pair<NodeId, GroupId>, std::vector<Bucket>> bucket_lists_;
  bool in_setup_ = false;
  SimTime busy_until_;
  SimTime cooldown_until_;
  bool congestion_handled_once_ = false;
  std::vector<RerouteRecord> reroutes_;
  std::vector<ControllerEvent> events_;
  ControllerStats stats_;
};

}  // namespace sdnft
