// Strongly typed identifiers for topology elements.
#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace sdnft {

template <typename Tag, typename Rep = uint32_t>
struct StrongId {
  Rep value = 0;

  constexpr StrongId() = default;
  constexpr explicit StrongId(Rep v) : value(v) {}
  constexpr auto operator<=>(const StrongId&) const = default;
};

// Switches and hosts share one node id space.
using NodeId = StrongId<struct NodeIdTag>;
// Port numbers are local to a node and start at 1.
using PortId = StrongId<struct PortIdTag, uint16_t>;
using LinkId = StrongId<struct LinkIdTag>;
using GroupId = StrongId<struct GroupIdTag>;

}  // namespace sdnft

template <typename Tag, typename Rep>
struct std::hash<sdnft::StrongId<Tag, Rep>> {
  size_t operator()(const sdnft::StrongId<Tag, Rep>& id) const noexcept {
    return std::hash<Rep>{}(id.value);
  }
};
