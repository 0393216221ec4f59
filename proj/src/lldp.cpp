#include "sdnft/lldp.hpp"

#include "sdnft/errors.hpp"
#include "sdnft/log.hpp"

namespace sdnft {

LldpMonitor::LldpMonitor(Simulator& sim, Network& network, ControlChannel& channel,
                         LldpConfig config)
    : sim_(sim), network_(network), channel_(channel), config_(config) {
  if (config_.update_interval <= SimTime::zero()) {
    throw ConfigError("LLDP update interval must be positive");
  }
  if (config_.detection_factor == 0) {
    throw ConfigError("LLDP detection factor must be at least 1");
  }
  for (const LinkInfo& l : network_.topology().links()) {
    if (l.inter_switch) links_.push_back(Monitored{l.id});
  }
  network_.set_lldp_handler(this);
}

void LldpMonitor::start() {
  if (!config_.enabled) return;
  sim_.schedule(sim_.now(), EventKind::kTimer, this);
}

void LldpMonitor::on_event(const Event& /*event*/) {
  round();
  sim_.schedule(sim_.now() + config_.update_interval, EventKind::kTimer, this);
}

void LldpMonitor::round() {
  const Topology& topo = network_.topology();
  if (rounds_ > 0) {
    for (Monitored& m : links_) {
      if (m.declared) continue;
      m.silent_rounds = m.seen ? 0 : m.silent_rounds + 1;
      if (m.silent_rounds >= config_.detection_factor) {
        m.declared = true;
        failures_.emplace_back(sim_.now(), m.link);
        log_debug("t={} LLDP declares link {} failed", sim_.now().to_string(),
                  topo.link(m.link).name);
        if (listener_) listener_(m.link);
      }
    }
  }
  ++rounds_;
  for (size_t i = 0; i < links_.size(); ++i) {
    Monitored& m = links_[i];
    m.seen = false;
    if (m.declared) continue;
    const LinkInfo& info = topo.link(m.link);
    for (const LinkEndpoint& ep : {info.a, info.b}) {
      channel_.to_switch([this, ep, i] {
        Packet p;
        p.kind = PacketKind::kLldp;
        p.size_bytes = kLldpPacketBytes;
        p.flow = FlowKey{ep.node, ep.node, 0};
        p.aux = i;
        network_.send_from_switch(ep.node, ep.port, p);
      });
    }
  }
}

void LldpMonitor::handle_packet(const Packet& packet, NodeId /*at*/,
                                PortId /*in_port*/) {
  const size_t index = packet.aux;
  if (index >= links_.size()) return;
  // The receiving switch punts the packet to the controller.
  channel_.to_controller([this, index] { links_[index].seen = true; });
}

}  // namespace sdnft
