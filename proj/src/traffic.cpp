#include "sdnft/traffic.hpp"

#include <algorithm>

#include "sdnft/errors.hpp"

namespace sdnft {

int64_t cbr_spacing_ns(const CbrConfig& config) {
  if (config.rate_bps == 0) throw ConfigError("CBR flow '" + config.id + "' has rate 0");
  const uint64_t bits = static_cast<uint64_t>(config.packet_bytes) * 8;
  return static_cast<int64_t>(bits * 1'000'000'000ULL / config.rate_bps);
}

FlowStats::FlowStats(SimTime bin_width, SimTime nominal_spacing)
    : bin_width_(bin_width),
      spacing_(nominal_spacing),
      gap_threshold_(std::max(nominal_spacing * 2, SimTime::from_us(500))) {
  if (bin_width_ <= SimTime::zero()) throw ConfigError("throughput bin must be positive");
}

void FlowStats::on_receive(SimTime now, uint32_t bytes) {
  ++received_;
  const uint64_t bits = static_cast<uint64_t>(bytes) * 8;
  bits_ += bits;
  const size_t bin = static_cast<size_t>(now.us() / bin_width_.us());
  if (bins_.size() <= bin) bins_.resize(bin + 1, 0);
  bins_[bin] += bits;
  if (last_ && now - *last_ > gap_threshold_) gaps_.push_back(Gap{*last_, now});
  if (!first_) first_ = now;
  last_ = now;
}

std::optional<double> packet_loss(const FlowStats& stats) {
  if (stats.sent() == 0) return std::nullopt;
  return static_cast<double>(stats.sent() - stats.received() - stats.in_flight()) /
         static_cast<double>(stats.sent());
}

std::optional<SimTime> recovery_gap(const FlowStats& stats, SimTime failure_at,
                                    SimTime window, SimTime observed_until) {
  if (!stats.last_arrival() || *stats.last_arrival() <= failure_at) return std::nullopt;
  // Packets still in flight at the end of observation are not a silence.
  constexpr SimTime kInFlightSlack = SimTime::from_ms(100);
  if (observed_until - *stats.last_arrival() > stats.gap_threshold() + kInFlightSlack) {
    return std::nullopt;
  }
  const SimTime window_end = window == SimTime::infinity() ? window : failure_at + window;
  SimTime longest;
  bool found = false;
  for (const Gap& g : stats.gaps()) {
    if (g.end <= failure_at || g.start >= window_end) continue;
    const SimTime len = g.end - g.start;
    if (!found || len > longest) longest = len;
    found = true;
  }
  if (!found) return SimTime::zero();
  return std::max(SimTime::zero(), longest - stats.nominal_spacing());
}

double mean_throughput_bps(const FlowStats& stats, SimTime from, SimTime to) {
  const int64_t w = stats.bin_width().us();
  const int64_t first = (from.us() + w - 1) / w;
  const int64_t last = to.us() / w;  // exclusive
  if (last <= first) return 0.0;
  uint64_t bits = 0;
  for (int64_t i = first; i < last; ++i) {
    if (static_cast<size_t>(i) < stats.bins().size()) bits += stats.bins()[i];
  }
  return static_cast<double>(bits) / (static_cast<double>((last - first) * w) / 1e6);
}

CbrTraffic::CbrTraffic(Simulator& sim, Network& network, SimTime bin_width)
    : sim_(sim), network_(network), bin_width_(bin_width) {}

size_t CbrTraffic::add_flow(const CbrConfig& config) {
  const Topology& topo = network_.topology();
  if (config.packet_bytes == 0) {
    throw ConfigError("CBR flow '" + config.id + "' has zero packet size");
  }
  const int64_t spacing = cbr_spacing_ns(config);
  if (spacing <= 0) throw ConfigError("CBR flow '" + config.id + "' rate is too high");
  if (topo.is_switch(config.src) || topo.is_switch(config.dst) || config.src == config.dst) {
    throw ConfigError("CBR flow '" + config.id + "' must connect two distinct hosts");
  }
  if (config.stop <= config.start) {
    throw ConfigError("CBR flow '" + config.id + "' stops before it starts");
  }
  for (const Flow& f : flows_) {
    if (f.config.src == config.src && f.config.dst == config.dst) {
      throw ConfigError("CBR flow '" + config.id +
                        "' duplicates the host pair of flow '" + f.config.id + "'");
    }
  }
  flows_.push_back(Flow{config, spacing, 0,
                        FlowStats(bin_width_, SimTime::from_us(spacing / 1000))});
  network_.register_host_handler(config.dst, tags::kCbr, this);
  return flows_.size() - 1;
}

std::optional<size_t> CbrTraffic::find(const std::string& id) const {
  for (size_t i = 0; i < flows_.size(); ++i) {
    if (flows_[i].config.id == id) return i;
  }
  return std::nullopt;
}

SimTime CbrTraffic::send_time(const Flow& f, uint64_t index) const {
  return f.config.start +
         SimTime::from_us(static_cast<int64_t>(index) * f.spacing_ns / 1000);
}

void CbrTraffic::start() {
  for (size_t i = 0; i < flows_.size(); ++i) {
    sim_.schedule(std::max(sim_.now(), flows_[i].config.start), EventKind::kTimer, this,
                  EventPayload{i, 0});
  }
}

void CbrTraffic::on_event(const Event& event) {
  Flow& f = flows_[event.payload.a];
  Packet p;
  p.kind = PacketKind::kData;
  p.size_bytes = f.config.packet_bytes;
  p.flow = FlowKey{f.config.src, f.config.dst, tags::kCbr};
  p.app = static_cast<uint32_t>(event.payload.a);
  p.seq = f.next_index++;
  f.stats.on_send();
  network_.send_from_host(f.config.src, p);
  const SimTime next = send_time(f, f.next_index);
  if (next < f.config.stop) {
    sim_.schedule(next, EventKind::kTimer, this, event.payload);
  }
}

void CbrTraffic::handle_packet(const Packet& packet, NodeId /*at*/, PortId /*in_port*/) {
  if (packet.app >= flows_.size()) return;
  flows_[packet.app].stats.on_receive(sim_.now(), packet.size_bytes);
}

void CbrTraffic::on_drop(const Packet& packet) {
  if (packet.app < flows_.size()) flows_[packet.app].stats.on_drop();
}

}  // namespace sdnft
