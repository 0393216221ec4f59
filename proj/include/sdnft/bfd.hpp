// Bidirectional Forwarding Detection sessions between adjacent switches.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sdnft/network.hpp"
#include "sdnft/simulator.hpp"

namespace sdnft {

// Detection time T_d = (M + 1) * T_i. Throws ConfigError when T_i <= 0.
SimTime compute_detection_time(SimTime t_i, unsigned m);

enum class BfdState : uint8_t { kUp, kDown };
const char* to_string(BfdState state);

inline constexpr uint32_t kBfdPacketBytes = 66;

struct BfdSessionConfig {
  LinkId link;
  SimTime t_i = SimTime::from_ms(100);
  unsigned m = 2;
  bool enabled = true;
};

// Per-endpoint session state.
struct BfdEndpoint {
  NodeId sw;
  PortId port;
  BfdState state = BfdState::kUp;
  SimTime last_rx;
  bool rx_in_interval = false;
  unsigned clean_intervals = 0;
};

// Timeout check, run at every transmit tick: an Up endpoint goes Down once
// nothing was received for longer than the detection time. Returns the new
// state on a transition.
std::optional<BfdState> bfd_check_timeout(BfdEndpoint& ep, SimTime detection_time,
                                          SimTime now);

// Closes one transmit interval: a Down endpoint that received something in
// each of M + 1 consecutive intervals comes back Up. Returns the new state on
// a transition.
std::optional<BfdState> bfd_close_interval(BfdEndpoint& ep, unsigned m);

// Records a reception (control or echo) at `now`.
void bfd_on_receive(BfdEndpoint& ep, SimTime now);

struct BfdTransition {
  SimTime at;
  LinkId link;
  NodeId sw;
  PortId port;
  BfdState state = BfdState::kUp;
};

class BfdManager : public EventTarget, public PacketHandler {
 public:
  using Listener = std::function<void(const BfdTransition&)>;

  // With jitter enabled each transmit interval is shortened by a random
  // fraction in [0, 0.25).
  BfdManager(Simulator& sim, Network& network, bool jitter = false);

  // Adds a session on an inter-switch link; disabled sessions are ignored.
  void add_session(const BfdSessionConfig& config);
  // Starts every session with a random phase within its first interval.
  void start();
  void set_listener(Listener listener) { listener_ = std::move(listener); }

  size_t session_count() const { return sessions_.size(); }
  const BfdEndpoint& endpoint(size_t session, int side) const {
    return sessions_.at(session).ends[side];
  }
  const BfdSessionConfig& session_config(size_t session) const {
    return sessions_.at(session).config;
  }
  const std::vector<BfdTransition>& transitions() const { return transitions_; }
  uint64_t packets_sent() const { return packets_sent_; }

  void on_event(const Event& event) override;
  void handle_packet(const Packet& packet, NodeId at, PortId in_port) override;

 private:
  struct Session {
    BfdSessionConfig config;
    SimTime detection_time;
    BfdEndpoint ends[2];
  };

  void tick(size_t session, int side);
  void send(size_t session, int side, PacketKind kind);
  void transition(Session& s, int side, BfdState state);

  Simulator& sim_;
  Network& network_;
  bool jitter_;
  std::vector<Session> sessions_;
  std::vector<BfdTransition> transitions_;
  Listener listener_;
  uint64_t packets_sent_ = 0;
};

}  // namespace sdnft
