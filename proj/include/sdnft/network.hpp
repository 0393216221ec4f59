// Runtime data plane: switches with flow tables and fast-failover groups,
// links with finite drop-tail queues, and the modeled control channel.
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "sdnft/flow_table.hpp"
#include "sdnft/packet.hpp"
#include "sdnft/simulator.hpp"
#include "sdnft/topology.hpp"

namespace sdnft {

enum class FailureMode : uint8_t { kPortDown, kTransparentCut };
const char* to_string(FailureMode mode);
FailureMode parse_failure_mode(const std::string& text);

enum class DropReason : uint8_t {
  kQueueOverflow,
  kCut,
  // No matching rule, no live bucket, unknown group or a down egress port.
  kNoRoute,
  // Packets in flight on a port that went down.
  kFlushed,
};
inline constexpr int kDropReasonCount = 4;
const char* to_string(DropReason reason);

struct PortState {
  bool link_layer_up = true;
  bool admin_up = true;
  bool bfd_monitored = false;
  bool bfd_up = true;

  bool live() const { return link_layer_up && admin_up && (!bfd_monitored || bfd_up); }
};

struct ForwardDecision {
  bool egress = false;
  PortId port;
  static ForwardDecision to(PortId p) { return {true, p}; }
  static ForwardDecision drop() { return {false, PortId()}; }
};

class Switch {
 public:
  Switch(NodeId id, size_t port_count) : id_(id), ports_(port_count + 1) {}

  NodeId id() const { return id_; }
  // Chooses the egress port for a packet; ties and liveness as in OpenFlow
  // fast-failover semantics. An unknown group drops.
  ForwardDecision forward(const FlowKey& key) const;
  // First live bucket's output port, if any.
  std::optional<PortId> first_live_bucket(const GroupEntry& group) const;

  FlowTable& table() { return table_; }
  const FlowTable& table() const { return table_; }
  // Installs or replaces a group; only fast-failover groups are accepted.
  void set_group(const GroupEntry& group);
  const GroupEntry* group(GroupId id) const;
  const std::unordered_map<GroupId, GroupEntry>& groups() const { return groups_; }

  PortState& port(PortId p) { return ports_.at(p.value); }
  const PortState& port(PortId p) const { return ports_.at(p.value); }
  size_t port_count() const { return ports_.size() - 1; }

 private:
  NodeId id_;
  std::vector<PortState> ports_;  // index 0 unused
  FlowTable table_;
  std::unordered_map<GroupId, GroupEntry> groups_;
};

struct DirectionCounters {
  uint64_t entered = 0;
  uint64_t delivered = 0;
  uint64_t queue_drops = 0;
  uint64_t cut_drops = 0;
  uint64_t flushed = 0;
  uint64_t bytes_delivered = 0;
};

// Models the controller <-> switch channel as a fixed one-way delay.
class ControlChannel {
 public:
  ControlChannel(Simulator& sim, SimTime delay) : sim_(sim), delay_(delay) {}
  void to_controller(std::function<void()> message) { deliver(std::move(message)); }
  void to_switch(std::function<void()> message) { deliver(std::move(message)); }
  // Sends a message that leaves the controller at `send_time` (>= now).
  void to_switch_at(SimTime send_time, std::function<void()> message) {
    ++messages_;
    sim_.call_at(send_time + delay_, EventKind::kControlMessage, std::move(message));
  }
  SimTime delay() const { return delay_; }
  uint64_t messages() const { return messages_; }

 private:
  void deliver(std::function<void()> message) {
    ++messages_;
    sim_.call_in(delay_, EventKind::kControlMessage, std::move(message));
  }
  Simulator& sim_;
  SimTime delay_;
  uint64_t messages_ = 0;
};

// Receives packets addressed to a host (demultiplexed by flow tag) or
// punted to the control plane at a switch.
class PacketHandler {
 public:
  virtual ~PacketHandler() = default;
  virtual void handle_packet(const Packet& packet, NodeId at, PortId in_port) = 0;
};

struct NetworkCounters {
  uint64_t created = 0;
  uint64_t consumed = 0;
  std::array<uint64_t, kDropReasonCount> drops{};
  // The same, restricted to DATA packets.
  uint64_t data_created = 0;
  uint64_t data_consumed = 0;
  std::array<uint64_t, kDropReasonCount> data_drops{};
};

class Network : public EventTarget {
 public:
  using PortStatusListener = std::function<void(NodeId sw, PortId port, bool up)>;
  using DropListener = std::function<void(const Packet&, DropReason)>;

  Network(Simulator& sim, const Topology& topology);

  const Topology& topology() const { return topology_; }
  Simulator& sim() { return sim_; }

  // Creates a packet at a host and transmits it on the host's access link.
  void send_from_host(NodeId host, Packet packet);
  // Creates a packet at a switch and transmits it out of `port` (used for
  // LLDP packet-out and BFD).
  void send_from_switch(NodeId sw, PortId port, Packet packet);

  void register_host_handler(NodeId host, uint16_t tag, PacketHandler* handler);
  void set_bfd_handler(PacketHandler* handler) { bfd_handler_ = handler; }
  void set_lldp_handler(PacketHandler* handler) { lldp_handler_ = handler; }
  void set_port_status_listener(PortStatusListener l) { port_status_ = std::move(l); }
  void set_drop_listener(DropListener l) { drop_listener_ = std::move(l); }

  // Applies a failure immediately. A failure on an already failed link is a
  // no-op that logs a warning and returns false.
  bool inject_failure(LinkId link, FailureMode mode);
  bool link_failed(LinkId link) const { return links_.at(link.value).failed; }
  bool link_cut(LinkId link, int direction) const {
    return links_.at(link.value).dir[direction].cut;
  }

  Switch& switch_at(NodeId id) { return *switches_.at(id.value); }
  const Switch& switch_at(NodeId id) const { return *switches_.at(id.value); }
  void set_bfd_liveness(NodeId sw, PortId port, bool monitored, bool up);

  // Queueing delay a new packet would see on the link in the given direction.
  SimTime backlog_delay(LinkId link, int direction) const;
  size_t queue_occupancy(LinkId link, int direction) const;
  const DirectionCounters& counters(LinkId link, int direction) const {
    return links_.at(link.value).dir[direction].counters;
  }
  const NetworkCounters& counters() const { return counters_; }
  size_t packets_in_transit() const { return live_packets_; }
  uint64_t data_in_transit() const {
    return counters_.data_created - counters_.data_consumed -
           [&] {
             uint64_t s = 0;
             for (auto d : counters_.data_drops) s += d;
             return s;
           }();
  }

  void on_event(const Event& event) override;

 private:
  struct Direction {
    int64_t busy_until_ns = 0;
    // Departure times (ns) of packets still queued or in serialization.
    std::deque<int64_t> backlog;
    uint32_t epoch = 0;
    bool cut = false;
    DirectionCounters counters;
  };
  struct LinkRuntime {
    std::array<Direction, 2> dir;
    bool failed = false;
    int64_t prop_ns = 0;
    uint64_t capacity_bps = 0;
    uint32_t queue_capacity = 0;
  };

  uint32_t allocate(Packet packet);
  void release(uint32_t slot);
  void transmit(uint32_t slot, NodeId from, PortId port);
  void arrive(uint32_t slot, NodeId at, PortId in_port);
  void drop(uint32_t slot, DropReason reason);
  void consume(uint32_t slot);

  Simulator& sim_;
  const Topology& topology_;
  std::vector<std::unique_ptr<Switch>> switches_;  // indexed by node id
  std::vector<LinkRuntime> links_;
  std::vector<Packet> pool_;
  std::vector<uint32_t> free_slots_;
  size_t live_packets_ = 0;
  uint64_t next_packet_id_ = 1;
  std::unordered_map<uint64_t, PacketHandler*> host_handlers_;
  PacketHandler* bfd_handler_ = nullptr;
  PacketHandler* lldp_handler_ = nullptr;
  PortStatusListener port_status_;
  DropListener drop_listener_;
  NetworkCounters counters_;
};

}  // namespace sdnft
