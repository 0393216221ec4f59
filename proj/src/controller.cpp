#include "sdnft/controller.hpp"

#include <algorithm>
#include <cmath>

#include "sdnft/errors.hpp"
#include "sdnft/log.hpp"

namespace sdnft {

const char* to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kRestoration:
      return "restoration";
    case Strategy::kStaticProtection:
      return "static_protection";
    case Strategy::kDpqoap:
      return "dpqoap";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& text) {
  if (text == "restoration") return Strategy::kRestoration;
  if (text == "static_protection") return Strategy::kStaticProtection;
  if (text == "dpqoap") return Strategy::kDpqoap;
  throw ConfigError("unknown strategy '" + text +
                    "' (expected restoration, static_protection or dpqoap)");
}

Controller::Controller(Simulator& sim, Network& network, ControlChannel& channel,
                       ControllerConfig config)
    : sim_(sim),
      network_(network),
      channel_(channel),
      config_(config),
      view_(network.topology()) {
  if (config_.compute_time < SimTime::zero()) {
    throw ConfigError("controller compute time must not be negative");
  }
  if (config_.strategy == Strategy::kDpqoap && config_.t_qoap <= SimTime::zero()) {
    throw ConfigError("DPQoAP interval must be positive");
  }
  if (config_.t_qoap_phase < SimTime::zero()) {
    throw ConfigError("DPQoAP phase must not be negative");
  }
  if (config_.k_max == 0) throw ConfigError("k_max must be at least 1");
  if (!(config_.congestion.reroute_fraction > 0.0 &&
        config_.congestion.reroute_fraction <= 1.0)) {
    throw ConfigError("congestion reroute fraction must lie in (0, 1]");
  }
}

void Controller::add_flow(const FlowKey& key, bool pinned) {
  const Topology& topo = network_.topology();
  if (topo.is_switch(key.src) || topo.is_switch(key.dst)) {
    throw ConfigError("flow endpoints must be hosts");
  }
  if (flows_.count(key)) return;
  FlowEntry entry;
  entry.pinned = pinned;
  if (pinned) {
    flows_.emplace(key, entry);
    return;
  }
  auto pair = std::make_pair(key.src, key.dst);
  auto it = group_by_pair_.find(pair);
  if (it == group_by_pair_.end()) {
    GroupId id(static_cast<uint32_t>(groups_.size() + 1));
    groups_.push_back(GroupState{id, key.src, key.dst, {}, std::nullopt});
    it = group_by_pair_.emplace(pair, id).first;
  }
  entry.group = it->second;
  flows_.emplace(key, entry);
}

void Controller::start() {
  in_setup_ = true;
  for (auto& [key, entry] : flows_) {
    if (!entry.pinned) continue;
    const auto paths = compute_all_paths(key.src, key.dst, 1);
    if (paths.empty()) {
      ++stats_.unroutable;
      continue;
    }
    reroute_flow(key, paths.front(), sim_.now());
  }
  if (config_.strategy == Strategy::kRestoration) {
    for (auto& [key, entry] : flows_) {
      if (entry.pinned) continue;
      const auto paths = compute_all_paths(key.src, key.dst, 1);
      if (paths.empty()) {
        ++stats_.unroutable;
        continue;
      }
      reroute_flow(key, paths.front(), sim_.now());
    }
  } else {
    for (GroupState& g : groups_) {
      g.paths = compute_all_paths(g.src, g.dst, config_.k_max);
      if (g.paths.empty()) {
        ++stats_.unroutable;
        continue;
      }
      g.primary = g.paths.front();
      for (const Path& p : g.paths) install_proactive_rules(p, g.id);
    }
  }
  in_setup_ = false;
  if (config_.strategy == Strategy::kDpqoap) {
    const SimTime first = config_.t_qoap_phase > SimTime::zero()
                              ? config_.t_qoap_phase
                              : config_.t_qoap;
    sim_.schedule(sim_.now() + first, EventKind::kTimer, this);
  }
}

void Controller::on_event(const Event& /*event*/) {
  dpqoap_evaluate();
  sim_.schedule(sim_.now() + config_.t_qoap, EventKind::kTimer, this);
}

std::vector<Path> Controller::compute_all_paths(NodeId src_host, NodeId dst_host,
                                                std::optional<size_t> k_max) const {
  return sdnft::compute_all_paths(view_, src_host, dst_host, k_max);
}

// ------------------------------------------------------------ messaging

SimTime Controller::reserve_compute() {
  const SimTime ready = std::max(sim_.now(), busy_until_) + config_.compute_time;
  busy_until_ = ready;
  return ready;
}

void Controller::push_rule(NodeId sw, const FlowRule& rule, SimTime send_time) {
  ++stats_.flow_mods;
  if (in_setup_) {
    network_.switch_at(sw).table().install(rule);
    return;
  }
  channel_.to_switch_at(send_time, [this, sw, rule] {
    network_.switch_at(sw).table().install(rule);
  });
}

void Controller::push_rule_removal(NodeId sw, const FlowMatch& match, int priority,
                                   SimTime send_time) {
  ++stats_.flow_mods;
  if (in_setup_) {
    network_.switch_at(sw).table().remove(match, priority);
    return;
  }
  channel_.to_switch_at(send_time, [this, sw, match, priority] {
    network_.switch_at(sw).table().remove(match, priority);
  });
}

void Controller::push_group(NodeId sw, const GroupEntry& group, SimTime send_time) {
  ++stats_.group_mods;
  if (in_setup_) {
    network_.switch_at(sw).set_group(group);
    return;
  }
  channel_.to_switch_at(send_time, [this, sw, group] {
    network_.switch_at(sw).set_group(group);
  });
}

void Controller::record(const std::string& kind, const std::string& entity,
                        double value) {
  events_.push_back(ControllerEvent{sim_.now(), kind, entity, value});
}

// ----------------------------------------------------------- protection

void Controller::install_proactive_rules(const Path& path, GroupId group) {
  const GroupState& g = groups_.at(group.value - 1);
  for (const Hop& hop : path.hops) {
    auto key = std::make_pair(hop.sw, group);
    auto it = bucket_lists_.find(key);
    if (it == bucket_lists_.end()) {
      it = bucket_lists_.emplace(key, std::vector<Bucket>{}).first;
      push_rule(hop.sw,
                FlowRule{FlowMatch::pair(g.src, g.dst), kGroupRulePriority,
                         GroupAction{group}},
                sim_.now());
    }
    std::vector<Bucket>& buckets = it->second;
    const bool contained =
        std::any_of(buckets.begin(), buckets.end(),
                    [&](const Bucket& b) { return b.out_port == hop.out; });
    if (!contained) buckets.push_back(Bucket{hop.out, hop.out});
    push_group(hop.sw, GroupEntry{group, GroupType::kFastFailover, buckets},
               sim_.now());
  }
}

void Controller::dpqoap_evaluate() {
  ++stats_.dpqoap_evaluations;
  // Current network state: fresh latency samples for every link believed up;
  // failed links keep their stale sample.
  for (const LinkInfo& l : network_.topology().links()) {
    if (!l.inter_switch || !view_.link_up(l.id)) continue;
    for (int d = 0; d < 2; ++d) view_.set_latency(l.id, d, measure_link_latency(l.id, d));
  }
  for (GroupState& g : groups_) {
    if (g.paths.empty()) continue;
    std::stable_sort(g.paths.begin(), g.paths.end(), [&](const Path& a, const Path& b) {
      const bool aa = view_.path_active(a);
      const bool ba = view_.path_active(b);
      if (aa != ba) return aa;
      return view_.path_latency(a) < view_.path_latency(b);
    });
    if (!view_.path_active(g.paths.front())) continue;
    g.primary = g.paths.front();
    organize_bucket_list(g.id, g.paths.front());
  }
}

size_t Controller::organize_bucket_list(GroupId group, const Path& primary) {
  const GroupState& g = groups_.at(group.value - 1);
  size_t pushed = 0;
  SimTime send_time = sim_.now();
  for (const Hop& hop : primary.hops) {
    auto it = bucket_lists_.find({hop.sw, group});
    if (it == bucket_lists_.end()) continue;
    const std::vector<Bucket>& current = it->second;
    // Rank of a port: latency of the best active path leaving through it.
    auto rank = [&](PortId port) {
      SimTime best = SimTime::infinity();
      for (const Path& p : g.paths) {
        if (!view_.path_active(p)) continue;
        for (size_t i = 0; i < p.hops.size(); ++i) {
          if (p.hops[i].sw == hop.sw && p.hops[i].out == port) {
            best = std::min(best, view_.path_latency(p, i));
          }
        }
      }
      return best;
    };
    std::vector<Bucket> head;
    std::vector<std::pair<SimTime, Bucket>> rest;
    for (const Bucket& b : current) {
      if (b.out_port == hop.out) {
        head.push_back(b);
      } else {
        rest.emplace_back(rank(b.out_port), b);
      }
    }
    std::stable_sort(rest.begin(), rest.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<Bucket> reordered = head;
    for (const auto& [r, b] : rest) reordered.push_back(b);
    if (reordered == current) continue;
    it->second = reordered;
    if (pushed == 0) send_time = reserve_compute();
    push_group(hop.sw, GroupEntry{group, GroupType::kFastFailover, reordered},
               send_time);
    ++pushed;
    ++stats_.bucket_reorders;
    record("bucket_reorder", network_.topology().name(hop.sw),
           static_cast<double>(group.value));
  }
  return pushed;
}

SimTime Controller::measure_link_latency(LinkId link, int direction) const {
  return network_.topology().link(link).params.prop_delay +
         network_.backlog_delay(link, direction);
}

// ---------------------------------------------------------- restoration

void Controller::reroute_flow(const FlowKey& key, const Path& path, SimTime send_time) {
  FlowEntry& entry = flows_.at(key);
  const FlowMatch match = FlowMatch::exact(key);
  for (const Hop& hop : path.hops) {
    push_rule(hop.sw, FlowRule{match, kFlowRulePriority, OutputAction{hop.out}},
              send_time);
  }
  if (entry.path) {
    for (const Hop& old : entry.path->hops) {
      if (!path.out_port_at(old.sw)) {
        push_rule_removal(old.sw, match, kFlowRulePriority, send_time);
      }
    }
  }
  entry.path = path;
}

size_t Controller::restoration_on_failure(LinkId link) {
  view_.set_link_up(link, false);
  std::vector<FlowKey> affected;
  for (const auto& [key, entry] : flows_) {
    if (!entry.pinned && entry.path && view_.traverses(*entry.path, link)) {
      affected.push_back(key);
    }
  }
  if (affected.empty()) return 0;
  const SimTime ready = reserve_compute();
  size_t unroutable = 0;
  for (const FlowKey& key : affected) {
    const auto paths = compute_all_paths(key.src, key.dst, 1);
    if (paths.empty()) {
      ++unroutable;
      continue;
    }
    reroute_flow(key, paths.front(), ready);
  }
  ++stats_.restorations;
  stats_.unroutable += unroutable;
  record("restoration", network_.topology().link(link).name,
         static_cast<double>(affected.size() - unroutable));
  if (unroutable > 0) {
    log_warn("t={} {} flow(s) unroutable after failure of {}", sim_.now().to_string(),
             unroutable, network_.topology().link(link).name);
  }
  return unroutable;
}

void Controller::handle_link_down(LinkId link, const char* source) {
  if (!view_.link_up(link)) return;
  record(std::string("link_down_") + source, network_.topology().link(link).name, 1);
  if (config_.strategy == Strategy::kRestoration) {
    restoration_on_failure(link);
  } else {
    // Fast-failover groups already react in the data plane; the controller
    // only updates its view (DPQoAP uses it at the next evaluation).
    view_.set_link_up(link, false);
  }
}

void Controller::on_port_status(NodeId sw, PortId port, bool up) {
  const LinkId link = network_.topology().link_at(sw, port);
  if (!up) handle_link_down(link, "port_status");
}

void Controller::on_lldp_link_failed(LinkId link) { handle_link_down(link, "lldp"); }

void Controller::on_bfd_transition(const BfdTransition& t) {
  const LinkInfo& info = network_.topology().link(t.link);
  if (config_.congestion.enabled) {
    if (t.state != BfdState::kDown) return;
    const NodeId peer = info.peer_of(t.sw).node;
    congestion_handler(t.link, info.direction_from(peer));
    return;
  }
  if (t.state == BfdState::kDown) handle_link_down(t.link, "bfd");
}

// ----------------------------------------------------------- congestion

std::vector<FlowKey> Controller::congestion_handler(LinkId link, int direction) {
  const LinkInfo& info = network_.topology().link(link);
  if (congestion_handled_once_ && sim_.now() < cooldown_until_) {
    record("congestion_suppressed", info.name, direction);
    return {};
  }
  const DirectedLink congested{link, direction};
  std::vector<FlowKey> candidates;
  for (const auto& [key, entry] : flows_) {
    if (entry.pinned) continue;
    const auto path = current_path(key);
    if (path && view_.traverses(*path, congested)) candidates.push_back(key);
  }
  const size_t n = candidates.size();
  const size_t quota = static_cast<size_t>(
      std::ceil(config_.congestion.reroute_fraction * static_cast<double>(n) - 1e-9));
  RerouteRecord rec{sim_.now(), link, direction, n, {}};
  const SimTime ready = quota > 0 ? reserve_compute() : sim_.now();
  for (size_t i = 0; i < quota; ++i) {
    const FlowKey& key = candidates[i];
    const auto paths = sdnft::compute_all_paths(view_, key.src, key.dst, config_.k_max,
                                                {link});
    if (paths.empty()) {
      log_warn("t={} no alternative path avoiding {} for a congested flow",
               sim_.now().to_string(), info.name);
      continue;
    }
    reroute_flow(key, paths.front(), ready);
    rec.moved.push_back(key);
  }
  congestion_handled_once_ = true;
  cooldown_until_ = sim_.now() + config_.congestion.cooldown;
  record("congestion_reroute", info.name, static_cast<double>(rec.moved.size()));
  reroutes_.push_back(std::move(rec));
  return reroutes_.back().moved;
}

// --------------------------------------------------------------- queries

std::optional<Path> Controller::current_path(const FlowKey& key) const {
  auto it = flows_.find(key);
  if (it == flows_.end()) return std::nullopt;
  if (it->second.path || it->second.pinned) return it->second.path;
  const GroupState& g = groups_.at(it->second.group.value - 1);
  return g.primary;
}

std::optional<GroupId> Controller::group_of(NodeId src, NodeId dst) const {
  auto it = group_by_pair_.find({src, dst});
  if (it == group_by_pair_.end()) return std::nullopt;
  return it->second;
}

const std::vector<Path>& Controller::group_paths(GroupId group) const {
  return groups_.at(group.value - 1).paths;
}

const std::vector<Bucket>* Controller::bucket_list(NodeId sw, GroupId group) const {
  auto it = bucket_lists_.find({sw, group});
  return it == bucket_lists_.end() ? nullptr : &it->second;
}

}  // namespace sdnft
