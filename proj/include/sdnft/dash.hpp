// DASH video streaming: a segment server with windowed chunk transport and
// clients with a playback buffer, throughput-based ABR and QoE logging.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdnft/abr.hpp"
#include "sdnft/network.hpp"
#include "sdnft/quality_model.hpp"
#include "sdnft/simulator.hpp"

namespace sdnft {

struct Mpd {
  Resolution resolution = Resolution::k1080p;
  std::vector<uint32_t> ladder_kbps;
  SimTime segment_duration = SimTime::from_s(1);
  uint32_t segment_count = 0;
};

// Builds the presentation for a video of the given length; the last partial
// segment is dropped.
Mpd make_mpd(Resolution resolution, SimTime segment_duration, SimTime video_length);

struct TransportConfig {
  uint32_t window_packets = 4;
  uint32_t packet_bytes = 1500;
  // Used until the first round-trip sample exists.
  SimTime initial_rto = SimTime::from_ms(200);
  // Client-side re-request period while no chunk of a segment has arrived.
  SimTime request_timeout = SimTime::from_s(1);
  uint32_t request_bytes = 300;
  uint32_t ack_bytes = 64;
};

// Retransmission timeout used by the chunk sender.
SimTime chunk_rto(std::optional<double> srtt_us, const TransportConfig& config);
// Number of packets carrying a segment of `bytes` bytes.
uint32_t chunk_count(uint64_t bytes, const TransportConfig& config);

struct DashClientConfig {
  std::string id;
  NodeId host;
  SimTime start;
};

struct QoeSample {
  SimTime t;
  uint32_t segment = 0;
  uint32_t bitrate_kbps = 0;
  double quality = 0;
  SimTime latency;
  bool switched = false;
};

struct ClientQoe {
  std::string client;
  size_t segments = 0;
  double avg_bitrate_kbps = 0;
  double avg_quality = 0;
  double avg_latency_us = 0;
  uint64_t switch_count = 0;
  uint64_t stall_count = 0;
  SimTime stall_time;
};

struct QoeReport {
  std::vector<ClientQoe> clients;
  // Means of the per-client values.
  double avg_bitrate_kbps = 0;
  double avg_quality = 0;
  double avg_latency_us = 0;
  double avg_switch_count = 0;
};

// Per-client and fleet averages over the given samples.
ClientQoe summarize_client(const std::string& client, const std::vector<QoeSample>& samples);
QoeReport make_qoe_report(const std::vector<ClientQoe>& clients);

struct BufferSample {
  SimTime t;
  SimTime level;
  // Quality of the segment on screen; zero while stalled or not started.
  double playing_quality = 0;
};

class DashSystem;

class DashClient {
 public:
  DashClient(DashSystem& system, size_t index, DashClientConfig config);

  const DashClientConfig& config() const { return config_; }
  const std::vector<QoeSample>& samples() const { return samples_; }
  const std::vector<BufferSample>& buffer_samples() const { return buffer_samples_; }
  // Buffer level at the current time.
  SimTime buffer_level() const;
  SimTime downloaded() const { return downloaded_; }
  SimTime played() const;
  uint64_t stall_count() const { return stall_count_; }
  SimTime stall_time() const;
  const std::vector<std::pair<SimTime, SimTime>>& stalls() const { return stalls_; }
  bool finished() const { return finished_; }
  ClientQoe qoe() const { return summarize_client(config_.id, samples_); }

  void handle_event(uint64_t what, uint64_t token);
  void handle_packet(const Packet& packet);

 private:
  enum : uint64_t { kStart, kRequestTimeout, kBufferEmpty, kDeferredRequest, kSample };

  void advance_playback();
  double playing_quality() const;
  void schedule_buffer_empty();
  void request_next();
  void send_request();
  void complete_segment();
  void schedule(SimTime at, uint64_t what, uint64_t token = 0);

  DashSystem& system_;
  size_t index_;
  DashClientConfig config_;
  AbrState abr_;
  bool started_ = false;
  bool finished_ = false;
  bool playing_ = false;
  bool stalled_ = false;
  SimTime buffer_;
  SimTime last_update_;
  SimTime downloaded_;
  SimTime played_;
  uint64_t buffer_token_ = 0;
  uint64_t request_token_ = 0;
  uint64_t stall_count_ = 0;
  std::vector<std::pair<SimTime, SimTime>> stalls_;
  SimTime stall_start_;
  // Segment in progress.
  uint32_t next_segment_ = 0;
  bool downloading_ = false;
  uint32_t seg_index_ = 0;
  size_t seg_rep_ = 0;
  uint64_t seg_bytes_ = 0;
  uint32_t seg_chunks_ = 0;
  uint32_t seg_received_ = 0;
  std::vector<bool> seg_have_;
  SimTime seg_requested_at_;
  std::optional<size_t> last_rep_;
  std::vector<QoeSample> samples_;
  std::vector<BufferSample> buffer_samples_;
};

// Server plus clients of one run. Every client sits on its own host.
class DashSystem : public EventTarget, public PacketHandler {
 public:
  DashSystem(Simulator& sim, Network& network, NodeId server, Mpd mpd, AbrConfig abr,
             TransportConfig transport, SimTime sample_interval = SimTime::from_s(1));

  size_t add_client(const DashClientConfig& config);
  void start();

  Simulator& sim() { return sim_; }
  Network& network() { return network_; }
  NodeId server() const { return server_; }
  const Mpd& mpd() const { return mpd_; }
  const AbrConfig& abr() const { return abr_; }
  const TransportConfig& transport() const { return transport_; }
  SimTime sample_interval() const { return sample_interval_; }
  size_t client_count() const { return clients_.size(); }
  const DashClient& client(size_t i) const { return clients_.at(i); }
  QoeReport report() const;
  uint64_t retransmissions() const { return retransmissions_; }

  void on_event(const Event& event) override;
  void handle_packet(const Packet& packet, NodeId at, PortId in_port) override;

 private:
  friend class DashClient;

  // Server-side state of the transfer towards one client.
  struct Transfer {
    bool active = false;
    uint32_t segment = 0;
    uint32_t total = 0;
    uint64_t bytes = 0;
    uint32_t base = 0;
    uint32_t end = 0;
    std::vector<bool> acked;
    uint64_t rto_token = 0;
    std::optional<double> srtt_us;
    bool has_segment = false;
  };

  void server_request(size_t client, uint32_t segment, uint64_t bytes);
  void server_ack(size_t client, uint32_t segment, uint32_t chunk, SimTime echoed);
  void send_window(size_t client);
  void send_chunk(size_t client, uint32_t chunk);
  void server_timeout(size_t client, uint64_t token);

  Simulator& sim_;
  Network& network_;
  NodeId server_;
  Mpd mpd_;
  AbrConfig abr_;
  TransportConfig transport_;
  SimTime sample_interval_;
  std::vector<DashClient> clients_;
  std::vector<Transfer> transfers_;
  uint64_t retransmissions_ = 0;
};

}  // namespace sdnft
