// Packets and flow keys carried through the data plane.
#pragma once

#include <compare>
#include <cstdint>

#include "sdnft/ids.hpp"
#include "sdnft/sim_time.hpp"

namespace sdnft {

enum class PacketKind : uint8_t {
  kData,
  kLldp,
  kBfdCtrl,
  kBfdEcho,
  kHttpReq,
  kHttpChunk,
  kAck,
};

const char* to_string(PacketKind kind);

// Traffic classes used as the flow-key tag.
namespace tags {
inline constexpr uint16_t kCbr = 1;
inline constexpr uint16_t kDash = 2;
}  // namespace tags

struct FlowKey {
  NodeId src;
  NodeId dst;
  uint16_t tag = 0;

  constexpr auto operator<=>(const FlowKey&) const = default;
};

struct Packet {
  uint64_t id = 0;
  PacketKind kind = PacketKind::kData;
  uint32_t size_bytes = 0;
  FlowKey flow;
  SimTime created_at;
  // Application-defined fields: an index identifying the sending flow or
  // connection, a sequence number and one extra word.
  uint32_t app = 0;
  uint64_t seq = 0;
  uint64_t aux = 0;
  // Switch traversals so far; forwarding loops are cut off at kMaxHops.
  uint8_t hops = 0;
};

inline constexpr uint8_t kMaxHops = 64;

}  // namespace sdnft
