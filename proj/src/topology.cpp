#include "sdnft/topology.hpp"

#include "sdnft/errors.hpp"

namespace sdnft {

NodeId Topology::add_node(const std::string& name, NodeKind kind) {
  if (name.empty()) throw ConfigError("node name must not be empty");
  if (by_name_.count(name)) throw ConfigError("duplicate node name '" + name + "'");
  NodeId id(static_cast<uint32_t>(nodes_.size()));
  nodes_.push_back(NodeInfo{id, kind, name, {}});
  by_name_.emplace(name, id);
  return id;
}

NodeId Topology::add_switch(const std::string& name) {
  return add_node(name, NodeKind::kSwitch);
}

NodeId Topology::add_host(const std::string& name) {
  return add_node(name, NodeKind::kHost);
}

LinkId Topology::add_link(NodeId a, NodeId b, const LinkParams& params) {
  if (a.value >= nodes_.size() || b.value >= nodes_.size()) {
    throw ConfigError("link endpoint does not exist");
  }
  if (a == b) throw ConfigError("self-loop link on '" + name(a) + "'");
  if (params.capacity_bps == 0) {
    throw ConfigError("link " + name(a) + "-" + name(b) + " has zero capacity");
  }
  if (params.prop_delay < SimTime::zero()) {
    throw ConfigError("link " + name(a) + "-" + name(b) +
                      " has negative propagation delay");
  }
  if (params.queue_capacity == 0) {
    throw ConfigError("link " + name(a) + "-" + name(b) +
                      " has zero queue capacity");
  }
  if (link_between(a, b)) {
    throw ConfigError("duplicate link " + name(a) + "-" + name(b));
  }
  for (NodeId n : {a, b}) {
    if (node(n).kind == NodeKind::kHost && !node(n).links.empty()) {
      throw ConfigError("host '" + name(n) + "' already has a link");
    }
  }
  if (node(a).kind == NodeKind::kHost && node(b).kind == NodeKind::kHost) {
    throw ConfigError("hosts '" + name(a) + "' and '" + name(b) +
                      "' cannot be linked directly");
  }
  LinkId id(static_cast<uint32_t>(links_.size()));
  NodeInfo& na = nodes_[a.value];
  NodeInfo& nb = nodes_[b.value];
  na.links.push_back(id);
  nb.links.push_back(id);
  LinkInfo info;
  info.id = id;
  info.a = {a, PortId(static_cast<uint16_t>(na.links.size()))};
  info.b = {b, PortId(static_cast<uint16_t>(nb.links.size()))};
  info.params = params;
  info.name = na.name + "-" + nb.name;
  info.inter_switch = na.kind == NodeKind::kSwitch && nb.kind == NodeKind::kSwitch;
  links_.push_back(info);
  return id;
}

std::vector<NodeId> Topology::switches() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::kSwitch) out.push_back(n.id);
  }
  return out;
}

std::vector<NodeId> Topology::hosts() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::kHost) out.push_back(n.id);
  }
  return out;
}

std::optional<NodeId> Topology::find_node(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<LinkId> Topology::find_link(const std::string& name) const {
  for (const auto& l : links_) {
    if (l.name == name) return l.id;
    const std::string reversed = nodes_[l.b.node.value].name + "-" +
                                 nodes_[l.a.node.value].name;
    if (reversed == name) return l.id;
  }
  return std::nullopt;
}

std::optional<LinkId> Topology::link_between(NodeId a, NodeId b) const {
  for (LinkId l : node(a).links) {
    if (link(l).peer_of(a).node == b) return l;
  }
  return std::nullopt;
}

LinkEndpoint Topology::attachment(NodeId host) const {
  const NodeInfo& h = node(host);
  if (h.kind != NodeKind::kHost || h.links.empty()) {
    throw ConfigError("'" + h.name + "' is not an attached host");
  }
  return link(h.links.front()).peer_of(host);
}

Topology Topology::canonical(const LinkParams& switch_link) {
  Topology t;
  NodeId s[7];
  for (int i = 1; i <= 6; ++i) s[i] = t.add_switch("S" + std::to_string(i));
  const int pairs[][2] = {{1, 2}, {2, 5}, {2, 3}, {3, 5}, {5, 6}, {3, 4}, {4, 5}};
  for (const auto& p : pairs) t.add_link(s[p[0]], s[p[1]], switch_link);
  return t;
}

}  // namespace sdnft
