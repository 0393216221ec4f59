// Constant-bit-rate (iPerf-like) traffic and per-flow delivery statistics.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdnft/network.hpp"
#include "sdnft/simulator.hpp"

namespace sdnft {

inline constexpr uint32_t kDefaultCbrPacketBytes = 1470;
inline constexpr SimTime kDefaultThroughputBin = SimTime::from_ms(100);

struct CbrConfig {
  std::string id;
  NodeId src;
  NodeId dst;
  uint64_t rate_bps = 0;
  uint32_t packet_bytes = kDefaultCbrPacketBytes;
  SimTime start;
  // Exclusive; infinity means until the end of the run.
  SimTime stop = SimTime::infinity();
};

// Spacing between consecutive packets of a CBR flow, in nanoseconds.
int64_t cbr_spacing_ns(const CbrConfig& config);

struct Gap {
  SimTime start;  // arrival before the gap
  SimTime end;    // arrival after the gap
};

class FlowStats {
 public:
  FlowStats(SimTime bin_width, SimTime nominal_spacing);

  void on_send() { ++sent_; }
  void on_receive(SimTime now, uint32_t bytes);
  void on_drop() { ++lost_; }

  uint64_t sent() const { return sent_; }
  uint64_t received() const { return received_; }
  uint64_t lost() const { return lost_; }
  uint64_t in_flight() const { return sent_ - received_ - lost_; }
  uint64_t bits_received() const { return bits_; }
  SimTime bin_width() const { return bin_width_; }
  SimTime nominal_spacing() const { return spacing_; }
  SimTime gap_threshold() const { return gap_threshold_; }
  // Bits received per bin; bin i covers [i * width, (i + 1) * width).
  const std::vector<uint64_t>& bins() const { return bins_; }
  const std::vector<Gap>& gaps() const { return gaps_; }
  std::optional<SimTime> first_arrival() const { return first_; }
  std::optional<SimTime> last_arrival() const { return last_; }

 private:
  SimTime bin_width_;
  SimTime spacing_;
  SimTime gap_threshold_;
  uint64_t sent_ = 0;
  uint64_t received_ = 0;
  uint64_t lost_ = 0;
  uint64_t bits_ = 0;
  std::vector<uint64_t> bins_;
  std::vector<Gap> gaps_;
  std::optional<SimTime> first_;
  std::optional<SimTime> last_;
};

// (sent - received - in_flight) / sent; absent when nothing was sent.
std::optional<double> packet_loss(const FlowStats& stats);

// Longest inter-arrival gap overlapping [failure_at, failure_at + window]
// minus the nominal spacing (zero when no gap stands out). Arrivals are
// expected until `observed_until` (the horizon, or the flow's stop time);
// a silence running into it (beyond in-flight slack) means the flow never recovered, and the result
// is then absent, as it is when no packet arrived after the failure.
std::optional<SimTime> recovery_gap(const FlowStats& stats, SimTime failure_at,
                                    SimTime window, SimTime observed_until);

// Mean received throughput (bit/s) over the bins lying within [from, to).
double mean_throughput_bps(const FlowStats& stats, SimTime from, SimTime to);

// Sources and sinks for every CBR flow of a run.
class CbrTraffic : public EventTarget, public PacketHandler {
 public:
  CbrTraffic(Simulator& sim, Network& network, SimTime bin_width = kDefaultThroughputBin);

  // Validates and registers a flow; returns its index.
  size_t add_flow(const CbrConfig& config);
  void start();

  size_t flow_count() const { return flows_.size(); }
  const CbrConfig& config(size_t i) const { return flows_.at(i).config; }
  const FlowStats& stats(size_t i) const { return flows_.at(i).stats; }
  std::optional<size_t> find(const std::string& id) const;
  // Drop notification from the network for a CBR packet.
  void on_drop(const Packet& packet);

  void on_event(const Event& event) override;
  void handle_packet(const Packet& packet, NodeId at, PortId in_port) override;

 private:
  struct Flow {
    CbrConfig config;
    int64_t spacing_ns;
    uint64_t next_index = 0;
    FlowStats stats;
  };

  SimTime send_time(const Flow& f, uint64_t index) const;

  Simulator& sim_;
  Network& network_;
  SimTime bin_width_;
  std::vector<Flow> flows_;
};

}  // namespace sdnft
