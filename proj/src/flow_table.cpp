#include "sdnft/flow_table.hpp"

#include <algorithm>

#include "sdnft/errors.hpp"

namespace sdnft {

GroupType parse_group_type(const std::string& text) {
  if (text == "fast_failover" || text == "ff") return GroupType::kFastFailover;
  if (text == "all" || text == "select" || text == "indirect") {
    throw ConfigError("group type '" + text +
                      "' is not supported; only fast_failover groups are");
  }
  throw ConfigError("unknown group type '" + text + "'");
}

void FlowTable::install(const FlowRule& rule) {
  for (auto& r : rules_) {
    if (r.priority == rule.priority && r.match == rule.match) {
      r.instruction = rule.instruction;
      return;
    }
  }
  // Insert after every rule with priority >= the new one.
  auto pos = std::find_if(rules_.begin(), rules_.end(), [&](const FlowRule& r) {
    return r.priority < rule.priority;
  });
  rules_.insert(pos, rule);
}

bool FlowTable::remove(const FlowMatch& match, int priority) {
  auto it = std::find_if(rules_.begin(), rules_.end(), [&](const FlowRule& r) {
    return r.priority == priority && r.match == match;
  });
  if (it == rules_.end()) return false;
  rules_.erase(it);
  return true;
}

void FlowTable::replace_all(const std::vector<FlowRule>& rules) {
  rules_.clear();
  for (const auto& r : rules) install(r);
}

const FlowRule* FlowTable::lookup(const FlowKey& key) const {
  for (const auto& r : rules_) {
    if (r.match.matches(key)) return &r;
  }
  return nullptr;
}

}  // namespace sdnft
