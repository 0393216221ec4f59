#include "sdnft/paths.hpp"

#include <algorithm>

#include "sdnft/errors.hpp"

namespace sdnft {

std::vector<NodeId> Path::switches() const {
  std::vector<NodeId> out;
  out.reserve(hops.size());
  for (const Hop& h : hops) out.push_back(h.sw);
  return out;
}

std::optional<PortId> Path::out_port_at(NodeId sw) const {
  for (const Hop& h : hops) {
    if (h.sw == sw) return h.out;
  }
  return std::nullopt;
}

NetworkView::NetworkView(const Topology& topology)
    : topology_(topology),
      up_(topology.links().size(), true),
      samples_(topology.links().size()) {}

SimTime NetworkView::latency(LinkId link, int direction) const {
  const auto& s = samples_.at(link.value)[direction];
  return s ? *s : topology_.link(link).params.prop_delay;
}

void NetworkView::set_latency(LinkId link, int direction, SimTime latency) {
  samples_.at(link.value)[direction] = latency;
}

std::vector<DirectedLink> NetworkView::links_of(const Path& path) const {
  std::vector<DirectedLink> out;
  for (size_t i = 0; i + 1 < path.hops.size(); ++i) {
    const Hop& h = path.hops[i];
    const LinkId l = topology_.link_at(h.sw, h.out);
    out.push_back(DirectedLink{l, topology_.link(l).direction_from(h.sw)});
  }
  return out;
}

SimTime NetworkView::path_latency(const Path& path, size_t from_hop) const {
  SimTime total;
  for (size_t i = from_hop; i + 1 < path.hops.size(); ++i) {
    const Hop& h = path.hops[i];
    const LinkId l = topology_.link_at(h.sw, h.out);
    total += latency(l, topology_.link(l).direction_from(h.sw));
  }
  return total;
}

bool NetworkView::path_active(const Path& path) const {
  for (const DirectedLink& d : links_of(path)) {
    if (!link_up(d.link)) return false;
  }
  return true;
}

bool NetworkView::traverses(const Path& path, LinkId link) const {
  for (const DirectedLink& d : links_of(path)) {
    if (d.link == link) return true;
  }
  return false;
}

bool NetworkView::traverses(const Path& path, DirectedLink link) const {
  for (const DirectedLink& d : links_of(path)) {
    if (d == link) return true;
  }
  return false;
}

bool path_precedes(const NetworkView& view, const Path& a, const Path& b) {
  if (a.hop_count() != b.hop_count()) return a.hop_count() < b.hop_count();
  const SimTime la = view.path_latency(a);
  const SimTime lb = view.path_latency(b);
  if (la != lb) return la < lb;
  return std::lexicographical_compare(
      a.hops.begin(), a.hops.end(), b.hops.begin(), b.hops.end(),
      [](const Hop& x, const Hop& y) { return x.sw < y.sw; });
}

namespace {

struct Dfs {
  const NetworkView& view;
  const Topology& topo;
  const std::vector<LinkId>& avoid;
  NodeId target;
  PortId target_host_port;
  std::vector<bool> on_path;
  std::vector<Hop> stack;
  std::vector<Path> found;

  bool usable(LinkId l) const {
    return topo.link(l).inter_switch && view.link_up(l) &&
           std::find(avoid.begin(), avoid.end(), l) == avoid.end();
  }

  void visit(NodeId sw) {
    if (sw == target) {
      Path p;
      p.hops = stack;
      p.hops.push_back(Hop{sw, target_host_port});
      found.push_back(std::move(p));
      return;
    }
    on_path[sw.value] = true;
    const NodeInfo& node = topo.node(sw);
    for (size_t i = 0; i < node.links.size(); ++i) {
      const LinkId l = node.links[i];
      if (!usable(l)) continue;
      const NodeId next = topo.link(l).peer_of(sw).node;
      if (on_path[next.value]) continue;
      stack.push_back(Hop{sw, PortId(static_cast<uint16_t>(i + 1))});
      visit(next);
      stack.pop_back();
    }
    on_path[sw.value] = false;
  }
};

}  // namespace

std::vector<Path> compute_all_paths(const NetworkView& view, NodeId src_host,
                                    NodeId dst_host, std::optional<size_t> k_max,
                                    const std::vector<LinkId>& avoid) {
  const Topology& topo = view.topology();
  const LinkEndpoint src = topo.attachment(src_host);
  const LinkEndpoint dst = topo.attachment(dst_host);
  if (src_host == dst_host) throw ConfigError("flow source equals destination");
  // A down access link makes the pair unroutable.
  if (!view.link_up(topo.link_at(src.node, src.port)) ||
      !view.link_up(topo.link_at(dst.node, dst.port))) {
    return {};
  }
  Dfs dfs{view, topo, avoid, dst.node, dst.port,
          std::vector<bool>(topo.nodes().size(), false), {}, {}};
  dfs.visit(src.node);
  std::vector<Path> paths = std::move(dfs.found);
  std::sort(paths.begin(), paths.end(), [&](const Path& a, const Path& b) {
    return path_precedes(view, a, b);
  });
  if (k_max && paths.size() > *k_max) paths.resize(*k_max);
  return paths;
}

}  // namespace sdnft
