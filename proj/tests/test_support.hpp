// Small fixtures shared by the unit tests.
#pragma once

#include <string>
#include <vector>

#include "sdnft/network.hpp"
#include "sdnft/paths.hpp"
#include "sdnft/topology.hpp"

namespace sdnft::testing {

// h1 - S1 - S2 - ... - Sn - h2 with identical switch links.
struct Line {
  Topology topo;
  std::vector<NodeId> switches;
  NodeId h1;
  NodeId h2;
  std::vector<LinkId> links;  // switch links, left to right
};

inline Line make_line(int n, const LinkParams& params, const LinkParams& host_params = {}) {
  Line l;
  for (int i = 0; i < n; ++i) l.switches.push_back(l.topo.add_switch("S" + std::to_string(i + 1)));
  for (int i = 0; i + 1 < n; ++i) {
    l.links.push_back(l.topo.add_link(l.switches[i], l.switches[i + 1], params));
  }
  l.h1 = l.topo.add_host("h1");
  l.h2 = l.topo.add_host("h2");
  l.topo.add_link(l.h1, l.switches.front(), host_params);
  l.topo.add_link(l.h2, l.switches.back(), host_params);
  return l;
}

// Installs exact output rules for `key` along the first path found.
inline Path install_route(Network& net, const FlowKey& key, int priority = 100) {
  NetworkView view(net.topology());
  const std::vector<Path> paths = compute_all_paths(view, key.src, key.dst, 1);
  for (const Hop& hop : paths.front().hops) {
    net.switch_at(hop.sw).table().install(
        FlowRule{FlowMatch::exact(key), priority, OutputAction{hop.out}});
  }
  return paths.front();
}

inline Packet data_packet(const FlowKey& key, uint32_t bytes, uint64_t seq = 0) {
  Packet p;
  p.kind = PacketKind::kData;
  p.size_bytes = bytes;
  p.flow = key;
  p.seq = seq;
  return p;
}

}  // namespace sdnft::testing
