#include "sdnft/bfd.hpp"

#include <random>

#include "sdnft/errors.hpp"
#include "sdnft/log.hpp"

namespace sdnft {

SimTime compute_detection_time(SimTime t_i, unsigned m) {
  if (t_i <= SimTime::zero()) {
    throw ConfigError("BFD transmit interval must be positive");
  }
  return t_i * static_cast<int64_t>(m + 1);
}

const char* to_string(BfdState state) {
  return state == BfdState::kUp ? "up" : "down";
}

std::optional<BfdState> bfd_check_timeout(BfdEndpoint& ep, SimTime detection_time,
                                          SimTime now) {
  if (ep.state == BfdState::kUp && now - ep.last_rx > detection_time) {
    ep.state = BfdState::kDown;
    ep.clean_intervals = 0;
    return BfdState::kDown;
  }
  return std::nullopt;
}

std::optional<BfdState> bfd_close_interval(BfdEndpoint& ep, unsigned m) {
  const bool received = ep.rx_in_interval;
  ep.rx_in_interval = false;
  if (ep.state != BfdState::kDown) return std::nullopt;
  ep.clean_intervals = received ? ep.clean_intervals + 1 : 0;
  if (ep.clean_intervals >= m + 1) {
    ep.state = BfdState::kUp;
    ep.clean_intervals = 0;
    return BfdState::kUp;
  }
  return std::nullopt;
}

void bfd_on_receive(BfdEndpoint& ep, SimTime now) {
  ep.last_rx = now;
  ep.rx_in_interval = true;
}

BfdManager::BfdManager(Simulator& sim, Network& network, bool jitter)
    : sim_(sim), network_(network), jitter_(jitter) {
  network_.set_bfd_handler(this);
}

void BfdManager::add_session(const BfdSessionConfig& config) {
  const SimTime t_d = compute_detection_time(config.t_i, config.m);
  if (!config.enabled) return;
  const LinkInfo& link = network_.topology().link(config.link);
  if (!link.inter_switch) {
    throw ConfigError("BFD session on link " + link.name +
                      " requires switches at both ends");
  }
  for (const Session& s : sessions_) {
    if (s.config.link == config.link) {
      throw ConfigError("duplicate BFD session on link " + link.name);
    }
  }
  Session s;
  s.config = config;
  s.detection_time = t_d;
  s.ends[0].sw = link.a.node;
  s.ends[0].port = link.a.port;
  s.ends[1].sw = link.b.node;
  s.ends[1].port = link.b.port;
  sessions_.push_back(s);
  for (const BfdEndpoint& ep : s.ends) {
    network_.set_bfd_liveness(ep.sw, ep.port, true, true);
  }
}

void BfdManager::start() {
  for (size_t i = 0; i < sessions_.size(); ++i) {
    Session& s = sessions_[i];
    std::uniform_int_distribution<int64_t> phase(0, s.config.t_i.us() - 1);
    const SimTime first = sim_.now() + SimTime::from_us(phase(sim_.rng()));
    for (int side = 0; side < 2; ++side) {
      s.ends[side].last_rx = first;
      sim_.schedule(first, EventKind::kTimer, this, EventPayload{i, uint64_t(side)});
    }
  }
}

void BfdManager::on_event(const Event& event) {
  tick(event.payload.a, static_cast<int>(event.payload.b));
}

void BfdManager::tick(size_t session, int side) {
  Session& s = sessions_[session];
  BfdEndpoint& ep = s.ends[side];
  const SimTime now = sim_.now();
  if (auto st = bfd_check_timeout(ep, s.detection_time, now)) transition(s, side, *st);
  if (auto st = bfd_close_interval(ep, s.config.m)) transition(s, side, *st);
  send(session, side, PacketKind::kBfdCtrl);
  SimTime interval = s.config.t_i;
  if (jitter_) {
    std::uniform_int_distribution<int64_t> j(0, s.config.t_i.us() / 4);
    interval -= SimTime::from_us(j(sim_.rng()));
  }
  sim_.schedule(now + interval, EventKind::kTimer, this,
                EventPayload{session, uint64_t(side)});
}

void BfdManager::send(size_t session, int side, PacketKind kind) {
  const Session& s = sessions_[session];
  const BfdEndpoint& from = s.ends[side];
  Packet p;
  p.kind = kind;
  p.size_bytes = kBfdPacketBytes;
  p.flow = FlowKey{from.sw, s.ends[1 - side].sw, 0};
  p.aux = (static_cast<uint64_t>(session) << 1) | static_cast<uint64_t>(side);
  ++packets_sent_;
  network_.send_from_switch(from.sw, from.port, p);
}

void BfdManager::handle_packet(const Packet& packet, NodeId /*at*/, PortId /*in_port*/) {
  const size_t session = packet.aux >> 1;
  const int sender = static_cast<int>(packet.aux & 1);
  if (session >= sessions_.size()) return;
  const int receiver = 1 - sender;
  bfd_on_receive(sessions_[session].ends[receiver], sim_.now());
  if (packet.kind == PacketKind::kBfdCtrl) send(session, receiver, PacketKind::kBfdEcho);
}

void BfdManager::transition(Session& s, int side, BfdState state) {
  BfdEndpoint& ep = s.ends[side];
  network_.set_bfd_liveness(ep.sw, ep.port, true, state == BfdState::kUp);
  const BfdTransition t{sim_.now(), s.config.link, ep.sw, ep.port, state};
  transitions_.push_back(t);
  log_debug("t={} BFD {} on {} at {}", t.at.to_string(), to_string(state),
            network_.topology().link(s.config.link).name,
            network_.topology().name(ep.sw));
  if (listener_) listener_(t);
}

}  // namespace sdnft
