#include "sdnft/network.hpp"

#include <algorithm>

#include "sdnft/errors.hpp"
#include "sdnft/log.hpp"

namespace sdnft {

const char* to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::kData:
      return "DATA";
    case PacketKind::kLldp:
      return "LLDP";
    case PacketKind::kBfdCtrl:
      return "BFD_CTRL";
    case PacketKind::kBfdEcho:
      return "BFD_ECHO";
    case PacketKind::kHttpReq:
      return "HTTP_REQ";
    case PacketKind::kHttpChunk:
      return "HTTP_CHUNK";
    case PacketKind::kAck:
      return "ACK";
  }
  return "UNKNOWN";
}

const char* to_string(FailureMode mode) {
  return mode == FailureMode::kPortDown ? "port_down" : "transparent_cut";
}

FailureMode parse_failure_mode(const std::string& text) {
  if (text == "port_down") return FailureMode::kPortDown;
  if (text == "transparent_cut") return FailureMode::kTransparentCut;
  throw ConfigError("unknown failure mode '" + text +
                    "' (expected port_down or transparent_cut)");
}

const char* to_string(DropReason reason) {
  switch (reason) {
    case DropReason::kQueueOverflow:
      return "queue_overflow";
    case DropReason::kCut:
      return "cut";
    case DropReason::kNoRoute:
      return "no_route";
    case DropReason::kFlushed:
      return "flushed";
  }
  return "unknown";
}

// ---------------------------------------------------------------- Switch

void Switch::set_group(const GroupEntry& group) {
  if (group.type != GroupType::kFastFailover) {
    throw ConfigError("only fast-failover groups are supported");
  }
  groups_[group.id] = group;
}

const GroupEntry* Switch::group(GroupId id) const {
  auto it = groups_.find(id);
  return it == groups_.end() ? nullptr : &it->second;
}

std::optional<PortId> Switch::first_live_bucket(const GroupEntry& group) const {
  for (const Bucket& b : group.buckets) {
    if (b.watch_port.value < ports_.size() && port(b.watch_port).live()) {
      return b.out_port;
    }
  }
  return std::nullopt;
}

ForwardDecision Switch::forward(const FlowKey& key) const {
  const FlowRule* rule = table_.lookup(key);
  if (rule == nullptr) return ForwardDecision::drop();
  if (const auto* out = std::get_if<OutputAction>(&rule->instruction)) {
    return ForwardDecision::to(out->port);
  }
  const GroupEntry* g = group(std::get<GroupAction>(rule->instruction).group);
  if (g == nullptr) return ForwardDecision::drop();
  if (auto port = first_live_bucket(*g)) return ForwardDecision::to(*port);
  return ForwardDecision::drop();
}

// --------------------------------------------------------------- Network

Network::Network(Simulator& sim, const Topology& topology)
    : sim_(sim), topology_(topology) {
  switches_.resize(topology.nodes().size());
  for (const NodeInfo& n : topology.nodes()) {
    if (n.kind == NodeKind::kSwitch) {
      switches_[n.id.value] = std::make_unique<Switch>(n.id, n.links.size());
    }
  }
  links_.resize(topology.links().size());
  for (const LinkInfo& l : topology.links()) {
    LinkRuntime& r = links_[l.id.value];
    r.prop_ns = l.params.prop_delay.us() * 1000;
    r.capacity_bps = l.params.capacity_bps;
    r.queue_capacity = l.params.queue_capacity;
  }
}

void Network::register_host_handler(NodeId host, uint16_t tag,
                                    PacketHandler* handler) {
  host_handlers_[(static_cast<uint64_t>(host.value) << 16) | tag] = handler;
}

uint32_t Network::allocate(Packet packet) {
  packet.id = next_packet_id_++;
  packet.created_at = sim_.now();
  ++counters_.created;
  if (packet.kind == PacketKind::kData) ++counters_.data_created;
  ++live_packets_;
  if (!free_slots_.empty()) {
    const uint32_t slot = free_slots_.back();
    free_slots_.pop_back();
    pool_[slot] = packet;
    return slot;
  }
  pool_.push_back(packet);
  return static_cast<uint32_t>(pool_.size() - 1);
}

void Network::release(uint32_t slot) {
  --live_packets_;
  free_slots_.push_back(slot);
}

void Network::drop(uint32_t slot, DropReason reason) {
  const Packet& p = pool_[slot];
  ++counters_.drops[static_cast<int>(reason)];
  if (p.kind == PacketKind::kData) ++counters_.data_drops[static_cast<int>(reason)];
  if (drop_listener_) drop_listener_(p, reason);
  release(slot);
}

void Network::consume(uint32_t slot) {
  ++counters_.consumed;
  if (pool_[slot].kind == PacketKind::kData) ++counters_.data_consumed;
  release(slot);
}

void Network::send_from_host(NodeId host, Packet packet) {
  const uint32_t slot = allocate(packet);
  transmit(slot, host, PortId(1));
}

void Network::send_from_switch(NodeId sw, PortId port, Packet packet) {
  const uint32_t slot = allocate(packet);
  transmit(slot, sw, port);
}

void Network::transmit(uint32_t slot, NodeId from, PortId port) {
  const LinkId link = topology_.link_at(from, port);
  const LinkInfo& info = topology_.link(link);
  LinkRuntime& lr = links_[link.value];
  if (lr.failed) {
    drop(slot, DropReason::kNoRoute);
    return;
  }
  const int d_index = info.direction_from(from);
  Direction& d = lr.dir[d_index];
  if (d.cut) {
    ++d.counters.cut_drops;
    drop(slot, DropReason::kCut);
    return;
  }
  const int64_t now_ns = sim_.now().us() * 1000;
  while (!d.backlog.empty() && d.backlog.front() <= now_ns) d.backlog.pop_front();
  if (d.backlog.size() >= lr.queue_capacity) {
    ++d.counters.queue_drops;
    drop(slot, DropReason::kQueueOverflow);
    return;
  }
  ++d.counters.entered;
  const uint64_t bits = static_cast<uint64_t>(pool_[slot].size_bytes) * 8;
  const int64_t ser_ns = static_cast<int64_t>(
      (bits * 1'000'000'000ULL + lr.capacity_bps - 1) / lr.capacity_bps);
  const int64_t start = std::max(now_ns, d.busy_until_ns);
  const int64_t departure = start + ser_ns;
  d.busy_until_ns = departure;
  d.backlog.push_back(departure);
  const int64_t arrival_ns = departure + lr.prop_ns;
  const SimTime at = SimTime::from_us((arrival_ns + 999) / 1000);
  const uint64_t tag = (static_cast<uint64_t>(link.value) << 33) |
                       (static_cast<uint64_t>(d_index) << 32) | d.epoch;
  sim_.schedule(at, EventKind::kPacketArrival, this, EventPayload{slot, tag});
}

void Network::on_event(const Event& event) {
  const uint32_t slot = static_cast<uint32_t>(event.payload.a);
  const LinkId link(static_cast<uint32_t>(event.payload.b >> 33));
  const int d_index = static_cast<int>((event.payload.b >> 32) & 1);
  const uint32_t epoch = static_cast<uint32_t>(event.payload.b & 0xffffffffu);
  Direction& d = links_[link.value].dir[d_index];
  if (epoch != d.epoch) {
    ++d.counters.flushed;
    drop(slot, DropReason::kFlushed);
    return;
  }
  if (d.cut) {
    ++d.counters.cut_drops;
    drop(slot, DropReason::kCut);
    return;
  }
  ++d.counters.delivered;
  d.counters.bytes_delivered += pool_[slot].size_bytes;
  const LinkInfo& info = topology_.link(link);
  const LinkEndpoint& to = d_index == 0 ? info.b : info.a;
  arrive(slot, to.node, to.port);
}

void Network::arrive(uint32_t slot, NodeId at, PortId in_port) {
  if (!topology_.is_switch(at)) {
    const Packet packet = pool_[slot];
    consume(slot);
    auto it = host_handlers_.find((static_cast<uint64_t>(at.value) << 16) |
                                  packet.flow.tag);
    if (it != host_handlers_.end()) it->second->handle_packet(packet, at, in_port);
    return;
  }
  const PacketKind kind = pool_[slot].kind;
  if (kind == PacketKind::kLldp || kind == PacketKind::kBfdCtrl ||
      kind == PacketKind::kBfdEcho) {
    const Packet packet = pool_[slot];
    consume(slot);
    PacketHandler* h = kind == PacketKind::kLldp ? lldp_handler_ : bfd_handler_;
    if (h != nullptr) h->handle_packet(packet, at, in_port);
    return;
  }
  if (++pool_[slot].hops > kMaxHops) {
    drop(slot, DropReason::kNoRoute);
    return;
  }
  const ForwardDecision decision = switches_[at.value]->forward(pool_[slot].flow);
  if (!decision.egress) {
    drop(slot, DropReason::kNoRoute);
    return;
  }
  transmit(slot, at, decision.port);
}

bool Network::inject_failure(LinkId link, FailureMode mode) {
  LinkRuntime& lr = links_.at(link.value);
  const LinkInfo& info = topology_.link(link);
  if (lr.failed || lr.dir[0].cut || lr.dir[1].cut) {
    log_warn("t={} failure {} on link {} ignored: link already failed",
             sim_.now().to_string(), to_string(mode), info.name);
    return false;
  }
  if (mode == FailureMode::kTransparentCut) {
    lr.dir[0].cut = true;
    lr.dir[1].cut = true;
    return true;
  }
  lr.failed = true;
  const int64_t now_ns = sim_.now().us() * 1000;
  for (Direction& d : lr.dir) {
    ++d.epoch;
    d.backlog.clear();
    d.busy_until_ns = now_ns;
  }
  for (const LinkEndpoint* e : {&info.a, &info.b}) {
    if (!topology_.is_switch(e->node)) continue;
    switches_[e->node.value]->port(e->port).link_layer_up = false;
  }
  for (const LinkEndpoint* e : {&info.a, &info.b}) {
    if (topology_.is_switch(e->node) && port_status_) {
      port_status_(e->node, e->port, false);
    }
  }
  return true;
}

void Network::set_bfd_liveness(NodeId sw, PortId port, bool monitored, bool up) {
  PortState& ps = switches_.at(sw.value)->port(port);
  ps.bfd_monitored = monitored;
  ps.bfd_up = up;
}

SimTime Network::backlog_delay(LinkId link, int direction) const {
  const Direction& d = links_.at(link.value).dir[direction];
  const int64_t now_ns = sim_.now().us() * 1000;
  return SimTime::from_us(std::max<int64_t>(0, d.busy_until_ns - now_ns) / 1000);
}

size_t Network::queue_occupancy(LinkId link, int direction) const {
  const Direction& d = links_.at(link.value).dir[direction];
  const int64_t now_ns = sim_.now().us() * 1000;
  return static_cast<size_t>(std::count_if(
      d.backlog.begin(), d.backlog.end(), [&](int64_t dep) { return dep > now_ns; }));
}

}  // namespace sdnft
