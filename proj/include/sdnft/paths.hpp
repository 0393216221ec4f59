// Controller-side network view and simple-path enumeration.
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sdnft/ids.hpp"
#include "sdnft/sim_time.hpp"
#include "sdnft/topology.hpp"

namespace sdnft {

inline constexpr size_t kDefaultMaxPaths = 8;

// One forwarding step: the switch and the port it sends the flow out of.
struct Hop {
  NodeId sw;
  PortId out;
  bool operator==(const Hop&) const = default;
};

struct DirectedLink {
  LinkId link;
  int direction = 0;
  bool operator==(const DirectedLink&) const = default;
};

// Switch-level path from the source host's switch to the destination host's
// switch; the last hop outputs to the destination host.
struct Path {
  std::vector<Hop> hops;

  size_t hop_count() const { return hops.empty() ? 0 : hops.size() - 1; }
  std::vector<NodeId> switches() const;
  std::optional<PortId> out_port_at(NodeId sw) const;
  bool operator==(const Path&) const = default;
};

// The controller's possibly stale picture of the network.
class NetworkView {
 public:
  explicit NetworkView(const Topology& topology);

  const Topology& topology() const { return topology_; }
  bool link_up(LinkId link) const { return up_.at(link.value); }
  void set_link_up(LinkId link, bool up) { up_.at(link.value) = up; }

  // Latest latency sample for a direction, or the propagation delay if the
  // link has never been measured.
  SimTime latency(LinkId link, int direction) const;
  void set_latency(LinkId link, int direction, SimTime latency);

  // Inter-switch links traversed by the path, with directions.
  std::vector<DirectedLink> links_of(const Path& path) const;
  // Summed latency of inter-switch links from hop `from_hop` to the end.
  SimTime path_latency(const Path& path, size_t from_hop = 0) const;
  bool path_active(const Path& path) const;
  bool traverses(const Path& path, LinkId link) const;
  bool traverses(const Path& path, DirectedLink link) const;

 private:
  const Topology& topology_;
  std::vector<bool> up_;
  std::vector<std::array<std::optional<SimTime>, 2>> samples_;
};

// Every simple path between the hosts' switches over links the view considers
// up (and not in `avoid`), ordered by (hop count, summed latency,
// lexicographic switch ids) and truncated to `k_max` when given.
std::vector<Path> compute_all_paths(const NetworkView& view, NodeId src_host,
                                    NodeId dst_host, std::optional<size_t> k_max,
                                    const std::vector<LinkId>& avoid = {});

// Ordering used by compute_all_paths; true when a precedes b.
bool path_precedes(const NetworkView& view, const Path& a, const Path& b);

}  // namespace sdnft
