// Static description of switches, hosts and the links between them.
#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdnft/ids.hpp"
#include "sdnft/sim_time.hpp"

namespace sdnft {

enum class NodeKind : uint8_t { kSwitch, kHost };

struct LinkParams {
  uint64_t capacity_bps = 1'000'000'000;
  SimTime prop_delay = SimTime::from_ms(1);
  // Per direction, in packets.
  uint32_t queue_capacity = 100;
};

struct LinkEndpoint {
  NodeId node;
  PortId port;
};

struct NodeInfo {
  NodeId id;
  NodeKind kind = NodeKind::kSwitch;
  std::string name;
  // links[p - 1] is the link attached to port p.
  std::vector<LinkId> links;
};

struct LinkInfo {
  LinkId id;
  LinkEndpoint a;
  LinkEndpoint b;
  LinkParams params;
  std::string name;

  bool inter_switch = false;
  // Endpoint on the given node; the node must be one of the two ends.
  const LinkEndpoint& end_at(NodeId node) const { return a.node == node ? a : b; }
  const LinkEndpoint& peer_of(NodeId node) const { return a.node == node ? b : a; }
  // Direction index of traffic leaving `from`: 0 is a->b, 1 is b->a.
  int direction_from(NodeId from) const { return a.node == from ? 0 : 1; }
};

class Topology {
 public:
  NodeId add_switch(const std::string& name);
  NodeId add_host(const std::string& name);
  // Connects two nodes using the next free port on each. Hosts accept a single
  // link; duplicate links between the same pair are rejected.
  LinkId add_link(NodeId a, NodeId b, const LinkParams& params);

  const NodeInfo& node(NodeId id) const { return nodes_.at(id.value); }
  const LinkInfo& link(LinkId id) const { return links_.at(id.value); }
  const std::vector<NodeInfo>& nodes() const { return nodes_; }
  const std::vector<LinkInfo>& links() const { return links_; }
  std::vector<NodeId> switches() const;
  std::vector<NodeId> hosts() const;

  std::optional<NodeId> find_node(const std::string& name) const;
  std::optional<LinkId> find_link(const std::string& name) const;
  std::optional<LinkId> link_between(NodeId a, NodeId b) const;
  LinkId link_at(NodeId node, PortId port) const {
    return nodes_.at(node.value).links.at(port.value - 1);
  }
  bool is_switch(NodeId id) const { return node(id).kind == NodeKind::kSwitch; }
  // Switch-side endpoint of a host's access link.
  LinkEndpoint attachment(NodeId host) const;
  const std::string& name(NodeId id) const { return node(id).name; }

  // The six-switch evaluation topology S1..S6 with links S1-S2, S2-S5,
  // S2-S3, S3-S5, S5-S6, S3-S4 and S4-S5.
  static Topology canonical(const LinkParams& switch_link);

 private:
  NodeId add_node(const std::string& name, NodeKind kind);

  std::vector<NodeInfo> nodes_;
  std::vector<LinkInfo> links_;
  std::unordered_map<std::string, NodeId> by_name_;
};

}  // namespace sdnft
