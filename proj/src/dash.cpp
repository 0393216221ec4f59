#include "sdnft/dash.hpp"

#include <algorithm>
#include <cmath>

#include "sdnft/errors.hpp"

namespace sdnft {
namespace {

constexpr uint64_t kServerTimeout = 15;
constexpr int kChunkBits = 24;
constexpr uint64_t kChunkMask = (uint64_t{1} << kChunkBits) - 1;
constexpr uint32_t kMinChunkBytes = 64;

uint64_t pack_chunk(uint32_t segment, uint32_t chunk) {
  return (static_cast<uint64_t>(segment) << kChunkBits) | chunk;
}

}  // namespace

Mpd make_mpd(Resolution resolution, SimTime segment_duration, SimTime video_length) {
  if (segment_duration <= SimTime::zero()) {
    throw ConfigError("segment duration must be positive");
  }
  if (video_length < segment_duration) {
    throw ConfigError("video is shorter than one segment");
  }
  Mpd mpd;
  mpd.resolution = resolution;
  mpd.ladder_kbps = bitrate_ladder(resolution);
  mpd.segment_duration = segment_duration;
  mpd.segment_count = static_cast<uint32_t>(video_length.us() / segment_duration.us());
  return mpd;
}

SimTime chunk_rto(std::optional<double> srtt_us, const TransportConfig& config) {
  if (!srtt_us) return config.initial_rto;
  return SimTime::from_us(std::max<int64_t>(1, std::llround(std::ceil(2.0 * *srtt_us))));
}

uint32_t chunk_count(uint64_t bytes, const TransportConfig& config) {
  return static_cast<uint32_t>(
      std::max<uint64_t>(1, (bytes + config.packet_bytes - 1) / config.packet_bytes));
}

ClientQoe summarize_client(const std::string& client, const std::vector<QoeSample>& samples) {
  ClientQoe q;
  q.client = client;
  q.segments = samples.size();
  if (samples.empty()) return q;
  double bitrate = 0, quality = 0, latency = 0;
  for (const QoeSample& s : samples) {
    bitrate += s.bitrate_kbps;
    quality += s.quality;
    latency += static_cast<double>(s.latency.us());
    if (s.switched) ++q.switch_count;
  }
  const double n = static_cast<double>(samples.size());
  q.avg_bitrate_kbps = bitrate / n;
  q.avg_quality = quality / n;
  q.avg_latency_us = latency / n;
  return q;
}

QoeReport make_qoe_report(const std::vector<ClientQoe>& clients) {
  QoeReport r;
  r.clients = clients;
  if (clients.empty()) return r;
  for (const ClientQoe& c : clients) {
    r.avg_bitrate_kbps += c.avg_bitrate_kbps;
    r.avg_quality += c.avg_quality;
    r.avg_latency_us += c.avg_latency_us;
    r.avg_switch_count += static_cast<double>(c.switch_count);
  }
  const double n = static_cast<double>(clients.size());
  r.avg_bitrate_kbps /= n;
  r.avg_quality /= n;
  r.avg_latency_us /= n;
  r.avg_switch_count /= n;
  return r;
}

// ------------------------------------------------------------ DashClient

DashClient::DashClient(DashSystem& system, size_t index, DashClientConfig config)
    : system_(system), index_(index), config_(std::move(config)) {}

void DashClient::schedule(SimTime at, uint64_t what, uint64_t token) {
  system_.sim().schedule(at, EventKind::kTimer, &system_,
                         EventPayload{(static_cast<uint64_t>(index_) << 4) | what, token});
}

SimTime DashClient::buffer_level() const {
  if (!playing_) return buffer_;
  const SimTime dt = system_.sim_.now() - last_update_;
  return buffer_ - std::min(dt, buffer_);
}

SimTime DashClient::played() const { return played_ + (buffer_ - buffer_level()); }

SimTime DashClient::stall_time() const {
  SimTime total;
  for (const auto& [from, to] : stalls_) total += to - from;
  if (stalled_) total += system_.sim_.now() - stall_start_;
  return total;
}

double DashClient::playing_quality() const {
  if (!playing_) return 0.0;
  const auto segment = static_cast<size_t>(played().us() /
                                           system_.mpd().segment_duration.us());
  return segment < samples_.size() ? samples_[segment].quality : 0.0;
}

void DashClient::advance_playback() {
  const SimTime now = system_.sim().now();
  if (playing_) {
    const SimTime used = std::min(now - last_update_, buffer_);
    buffer_ -= used;
    played_ += used;
  }
  last_update_ = now;
}

void DashClient::schedule_buffer_empty() {
  ++buffer_token_;
  if (playing_) schedule(last_update_ + buffer_, kBufferEmpty, buffer_token_);
}

void DashClient::handle_event(uint64_t what, uint64_t token) {
  Simulator& sim = system_.sim();
  switch (what) {
    case kStart:
      started_ = true;
      last_update_ = sim.now();
      request_next();
      schedule(sim.now(), kSample);
      break;
    case kSample:
      buffer_samples_.push_back(BufferSample{sim.now(), buffer_level(), playing_quality()});
      if (!finished_) schedule(sim.now() + system_.sample_interval(), kSample);
      break;
    case kBufferEmpty:
      if (token != buffer_token_) break;
      advance_playback();
      playing_ = false;
      if (next_segment_ >= system_.mpd().segment_count && !downloading_) {
        finished_ = true;
      } else {
        stalled_ = true;
        stall_start_ = sim.now();
        ++stall_count_;
      }
      break;
    case kDeferredRequest:
      request_next();
      break;
    case kRequestTimeout:
      if (token == request_token_ && downloading_ && seg_received_ == 0) send_request();
      break;
    default:
      break;
  }
}

void DashClient::request_next() {
  if (downloading_ || next_segment_ >= system_.mpd().segment_count) return;
  advance_playback();
  const AbrConfig& cfg = system_.abr();
  if (buffer_ >= cfg.max_buffer) {
    if (playing_) {
      schedule(system_.sim().now() + (buffer_ - cfg.max_buffer) + SimTime::from_us(1),
               kDeferredRequest);
    }
    return;
  }
  const Mpd& mpd = system_.mpd();
  abr_.buffer = buffer_;
  const size_t rep = abr_select(abr_, mpd.ladder_kbps, mpd.segment_duration, cfg);
  abr_.current = rep;
  seg_index_ = next_segment_++;
  seg_rep_ = rep;
  seg_bytes_ = static_cast<uint64_t>(mpd.ladder_kbps[rep]) *
               static_cast<uint64_t>(mpd.segment_duration.us()) / 8000;
  seg_chunks_ = chunk_count(seg_bytes_, system_.transport());
  seg_received_ = 0;
  seg_have_.assign(seg_chunks_, false);
  seg_requested_at_ = system_.sim().now();
  downloading_ = true;
  send_request();
}

void DashClient::send_request() {
  Packet p;
  p.kind = PacketKind::kHttpReq;
  p.size_bytes = system_.transport().request_bytes;
  p.flow = FlowKey{config_.host, system_.server(), tags::kDash};
  p.app = static_cast<uint32_t>(index_);
  p.seq = seg_index_;
  p.aux = seg_bytes_;
  system_.network().send_from_host(config_.host, p);
  schedule(system_.sim().now() + system_.transport().request_timeout, kRequestTimeout,
           ++request_token_);
}

void DashClient::handle_packet(const Packet& packet) {
  if (packet.kind != PacketKind::kHttpChunk) return;
  const uint32_t segment = static_cast<uint32_t>(packet.seq >> kChunkBits);
  const uint32_t chunk = static_cast<uint32_t>(packet.seq & kChunkMask);
  Packet ack;
  ack.kind = PacketKind::kAck;
  ack.size_bytes = system_.transport().ack_bytes;
  ack.flow = FlowKey{config_.host, system_.server(), tags::kDash};
  ack.app = static_cast<uint32_t>(index_);
  ack.seq = packet.seq;
  ack.aux = static_cast<uint64_t>(packet.created_at.us());
  system_.network().send_from_host(config_.host, ack);
  if (!downloading_ || segment != seg_index_ || chunk >= seg_chunks_ || seg_have_[chunk]) {
    return;
  }
  seg_have_[chunk] = true;
  if (++seg_received_ == seg_chunks_) complete_segment();
}

void DashClient::complete_segment() {
  const SimTime now = system_.sim().now();
  const Mpd& mpd = system_.mpd();
  downloading_ = false;
  ++request_token_;
  advance_playback();
  buffer_ += mpd.segment_duration;
  downloaded_ += mpd.segment_duration;
  const SimTime latency = now - seg_requested_at_;
  const double seconds = std::max(latency.seconds(), 1e-6);
  abr_update_throughput(abr_, static_cast<double>(seg_bytes_) * 8.0 / seconds,
                        system_.abr());
  const uint32_t kbps = mpd.ladder_kbps[seg_rep_];
  const bool switched = last_rep_ && *last_rep_ != seg_rep_;
  samples_.push_back(QoeSample{now, seg_index_, kbps, video_quality(kbps, mpd.resolution),
                               latency, switched});
  last_rep_ = seg_rep_;
  if (!playing_ && !finished_) {
    if (stalled_) {
      stalls_.emplace_back(stall_start_, now);
      stalled_ = false;
    }
    playing_ = true;
  }
  schedule_buffer_empty();
  request_next();
}

// ------------------------------------------------------------ DashSystem

DashSystem::DashSystem(Simulator& sim, Network& network, NodeId server, Mpd mpd,
                       AbrConfig abr, TransportConfig transport, SimTime sample_interval)
    : sim_(sim),
      network_(network),
      server_(server),
      mpd_(std::move(mpd)),
      abr_(abr),
      transport_(transport),
      sample_interval_(sample_interval) {
  if (network.topology().is_switch(server)) throw ConfigError("DASH server must be a host");
  if (mpd_.segment_count == 0) throw ConfigError("video has no segments");
  if (transport_.window_packets == 0 || transport_.packet_bytes < kMinChunkBytes) {
    throw ConfigError("invalid chunk transport parameters");
  }
  if (!(abr_.ewma_alpha > 0 && abr_.ewma_alpha <= 1) ||
      !(abr_.safety_factor > 0 && abr_.safety_factor <= 1)) {
    throw ConfigError("ABR alpha and safety factor must lie in (0, 1]");
  }
  if (sample_interval_ <= SimTime::zero()) {
    throw ConfigError("buffer sample interval must be positive");
  }
  network_.register_host_handler(server_, tags::kDash, this);
}

size_t DashSystem::add_client(const DashClientConfig& config) {
  const Topology& topo = network_.topology();
  if (topo.is_switch(config.host) || config.host == server_) {
    throw ConfigError("DASH client '" + config.id + "' must sit on a host other than the server");
  }
  for (const DashClient& c : clients_) {
    if (c.config().host == config.host) {
      throw ConfigError("DASH clients '" + c.config().id + "' and '" + config.id +
                        "' share a host");
    }
  }
  clients_.emplace_back(*this, clients_.size(), config);
  transfers_.emplace_back();
  network_.register_host_handler(config.host, tags::kDash, this);
  return clients_.size() - 1;
}

void DashSystem::start() {
  for (size_t i = 0; i < clients_.size(); ++i) {
    sim_.schedule(std::max(sim_.now(), clients_[i].config().start), EventKind::kTimer, this,
                  EventPayload{(static_cast<uint64_t>(i) << 4) | 0, 0});
  }
}

QoeReport DashSystem::report() const {
  std::vector<ClientQoe> per_client;
  for (const DashClient& c : clients_) {
    ClientQoe q = c.qoe();
    q.stall_count = c.stall_count();
    q.stall_time = c.stall_time();
    per_client.push_back(q);
  }
  return make_qoe_report(per_client);
}

void DashSystem::on_event(const Event& event) {
  const size_t client = event.payload.a >> 4;
  const uint64_t what = event.payload.a & 0xf;
  if (what == kServerTimeout) {
    server_timeout(client, event.payload.b);
  } else {
    clients_[client].handle_event(what, event.payload.b);
  }
}

void DashSystem::handle_packet(const Packet& packet, NodeId at, PortId /*in_port*/) {
  if (packet.app >= clients_.size()) return;
  if (at != server_) {
    clients_[packet.app].handle_packet(packet);
    return;
  }
  if (packet.kind == PacketKind::kHttpReq) {
    server_request(packet.app, static_cast<uint32_t>(packet.seq), packet.aux);
  } else if (packet.kind == PacketKind::kAck) {
    server_ack(packet.app, static_cast<uint32_t>(packet.seq >> kChunkBits),
               static_cast<uint32_t>(packet.seq & kChunkMask),
               SimTime::from_us(static_cast<int64_t>(packet.aux)));
  }
}

void DashSystem::server_request(size_t client, uint32_t segment, uint64_t bytes) {
  Transfer& t = transfers_[client];
  if (t.has_segment && t.segment == segment) return;  // duplicate request
  t.active = true;
  t.has_segment = true;
  t.segment = segment;
  t.bytes = bytes;
  t.total = chunk_count(bytes, transport_);
  t.base = 0;
  send_window(client);
}

void DashSystem::send_window(size_t client) {
  Transfer& t = transfers_[client];
  t.end = std::min(t.base + transport_.window_packets, t.total);
  t.acked.assign(t.end - t.base, false);
  for (uint32_t i = t.base; i < t.end; ++i) send_chunk(client, i);
  sim_.schedule(sim_.now() + chunk_rto(t.srtt_us, transport_), EventKind::kTimer, this,
                EventPayload{(static_cast<uint64_t>(client) << 4) | kServerTimeout,
                             ++t.rto_token});
}

void DashSystem::send_chunk(size_t client, uint32_t chunk) {
  const Transfer& t = transfers_[client];
  const uint64_t offset = static_cast<uint64_t>(chunk) * transport_.packet_bytes;
  const uint64_t remaining = t.bytes > offset ? t.bytes - offset : 0;
  Packet p;
  p.kind = PacketKind::kHttpChunk;
  p.size_bytes = static_cast<uint32_t>(
      std::clamp<uint64_t>(remaining, kMinChunkBytes, transport_.packet_bytes));
  p.flow = FlowKey{server_, clients_[client].config().host, tags::kDash};
  p.app = static_cast<uint32_t>(client);
  p.seq = pack_chunk(t.segment, chunk);
  network_.send_from_host(server_, p);
}

void DashSystem::server_ack(size_t client, uint32_t segment, uint32_t chunk,
                            SimTime echoed) {
  Transfer& t = transfers_[client];
  if (!t.active || segment != t.segment) return;
  const double sample = static_cast<double>((sim_.now() - echoed).us());
  t.srtt_us = t.srtt_us ? 0.875 * *t.srtt_us + 0.125 * sample : sample;
  if (chunk < t.base || chunk >= t.end || t.acked[chunk - t.base]) return;
  t.acked[chunk - t.base] = true;
  if (!std::all_of(t.acked.begin(), t.acked.end(), [](bool a) { return a; })) return;
  t.base = t.end;
  if (t.base >= t.total) {
    t.active = false;
    ++t.rto_token;
    return;
  }
  send_window(client);
}

void DashSystem::server_timeout(size_t client, uint64_t token) {
  Transfer& t = transfers_[client];
  if (!t.active || token != t.rto_token) return;
  for (uint32_t i = t.base; i < t.end; ++i) {
    if (!t.acked[i - t.base]) {
      send_chunk(client, i);
      ++retransmissions_;
    }
  }
  sim_.schedule(sim_.now() + chunk_rto(t.srtt_us, transport_), EventKind::kTimer, this,
                EventPayload{(static_cast<uint64_t>(client) << 4) | kServerTimeout,
                             ++t.rto_token});
}

}  // namespace sdnft
