// OpenFlow-style flow rules and fast-failover groups.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sdnft/ids.hpp"
#include "sdnft/packet.hpp"

namespace sdnft {

// Absent fields are wildcards.
struct FlowMatch {
  std::optional<NodeId> src;
  std::optional<NodeId> dst;
  std::optional<uint16_t> tag;

  bool matches(const FlowKey& key) const {
    return (!src || *src == key.src) && (!dst || *dst == key.dst) &&
           (!tag || *tag == key.tag);
  }
  static FlowMatch exact(const FlowKey& key) { return {key.src, key.dst, key.tag}; }
  static FlowMatch pair(NodeId src, NodeId dst) { return {src, dst, std::nullopt}; }
  bool operator==(const FlowMatch&) const = default;
};

struct OutputAction {
  PortId port;
  bool operator==(const OutputAction&) const = default;
};
struct GroupAction {
  GroupId group;
  bool operator==(const GroupAction&) const = default;
};
using Instruction = std::variant<OutputAction, GroupAction>;

struct FlowRule {
  FlowMatch match;
  int priority = 0;
  Instruction instruction;
};

enum class GroupType : uint8_t { kAll, kSelect, kIndirect, kFastFailover };

// Only fast-failover groups are supported; every other type is a
// configuration error.
GroupType parse_group_type(const std::string& text);

struct Bucket {
  PortId watch_port;
  PortId out_port;
  bool operator==(const Bucket&) const = default;
};

struct GroupEntry {
  GroupId id;
  GroupType type = GroupType::kFastFailover;
  std::vector<Bucket> buckets;
};

// Priority-ordered rule list; among equal priorities the earliest installed
// rule wins.
class FlowTable {
 public:
  // Replaces a rule with the same match and priority in place (keeping its
  // installation order), otherwise appends.
  void install(const FlowRule& rule);
  bool remove(const FlowMatch& match, int priority);
  void replace_all(const std::vector<FlowRule>& rules);
  const FlowRule* lookup(const FlowKey& key) const;
  const std::vector<FlowRule>& rules() const { return rules_; }
  size_t size() const { return rules_.size(); }

 private:
  // Kept sorted by descending priority; stable insertion preserves the
  // installation order within a priority.
  std::vector<FlowRule> rules_;
};

}  // namespace sdnft
