// Controller-driven LLDP link discovery used as the slow failure detector.
#pragma once

#include <functional>
#include <vector>

#include "sdnft/network.hpp"
#include "sdnft/simulator.hpp"

namespace sdnft {

inline constexpr uint32_t kLldpPacketBytes = 64;

struct LldpConfig {
  SimTime update_interval = SimTime::from_s(12);
  unsigned detection_factor = 2;
  bool enabled = true;
};

// Every round the controller sends a packet-out on both ends of each
// inter-switch link; the far switch punts it back as a packet-in. A link that
// stays silent for `detection_factor` consecutive rounds is declared failed
// at the start of the following round.
class LldpMonitor : public EventTarget, public PacketHandler {
 public:
  using Listener = std::function<void(LinkId)>;

  LldpMonitor(Simulator& sim, Network& network, ControlChannel& channel,
              LldpConfig config);

  void start();
  void set_listener(Listener listener) { listener_ = std::move(listener); }
  const LldpConfig& config() const { return config_; }
  // Links declared failed, with the declaration time.
  const std::vector<std::pair<SimTime, LinkId>>& failures() const { return failures_; }

  void on_event(const Event& event) override;
  void handle_packet(const Packet& packet, NodeId at, PortId in_port) override;

 private:
  struct Monitored {
    LinkId link;
    bool seen = false;
    unsigned silent_rounds = 0;
    bool declared = false;
  };

  void round();

  Simulator& sim_;
  Network& network_;
  ControlChannel& channel_;
  LldpConfig config_;
  std::vector<Monitored> links_;
  std::vector<std::pair<SimTime, LinkId>> failures_;
  uint64_t rounds_ = 0;
  Listener listener_;
};

}  // namespace sdnft
