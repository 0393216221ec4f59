#include "sdnft/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "sdnft/controller.hpp"
#include "sdnft/errors.hpp"
#include "sdnft/network.hpp"
#include "sdnft/quality_model.hpp"

namespace sdnft {
namespace {

// Reads one JSON object, remembering which keys were consumed so that any
// leftover key can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const Json& node, std::string location)
      : node_(node), location_(std::move(location)) {
    if (!node_.is_object()) fail(location_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
  }

  std::string at(const std::string& key) const { return location_ + "/" + key; }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  const Json& require(const std::string& key) {
    const Json* j = find(key);
    if (j == nullptr) fail(at(key), "missing required key");
    return *j;
  }

  template <typename T>
  void get(const std::string& key, T& out, bool required = false) {
    const Json* j = required ? &require(key) : find(key);
    if (j == nullptr) return;
    out = convert<T>(*j, at(key));
  }

  template <typename T>
  static T convert(const Json& j, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!j.is_boolean()) fail(where, "expected a boolean");
      return j.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!j.is_string()) fail(where, "expected a string");
      return j.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!j.is_number()) fail(where, "expected a number");
      return j.get<T>();
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() &&
                                     j.get<int64_t>() < 0)) {
        fail(where, "expected a non-negative integer");
      }
      const uint64_t v = j.get<uint64_t>();
      if (v > std::numeric_limits<T>::max()) fail(where, "value out of range");
      return static_cast<T>(v);
    } else {
      if (!j.is_number_integer()) fail(where, "expected an integer");
      return j.get<T>();
    }
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
    }
  }

 private:
  const Json& node_;
  std::string location_;
  std::set<std::string> seen_;
};

template <typename T, typename F>
void read_array(ObjectReader& r, const std::string& key, std::vector<T>& out, F&& parse) {
  const Json* arr = r.find(key);
  if (arr == nullptr) return;
  if (!arr->is_array()) ObjectReader::fail(r.at(key), "expected an array");
  out.clear();
  for (size_t i = 0; i < arr->size(); ++i) {
    out.push_back(parse((*arr)[i], r.at(key) + "/" + std::to_string(i)));
  }
}

LinkSpec parse_link(const Json& j, const std::string& loc) {
  ObjectReader r(j, loc);
  LinkSpec l;
  r.get("a", l.a, true);
  r.get("b", l.b, true);
  r.get("capacity_bps", l.capacity_bps);
  r.get("delay_us", l.delay_us);
  r.get("queue_packets", l.queue_packets);
  r.finish();
  return l;
}

HostSpec parse_host(const Json& j, const std::string& loc) {
  ObjectReader r(j, loc);
  HostSpec h;
  r.get("name", h.name, true);
  r.get("attach", h.attach, true);
  r.get("capacity_bps", h.capacity_bps);
  r.get("delay_us", h.delay_us);
  r.get("queue_packets", h.queue_packets);
  r.finish();
  return h;
}

std::string parse_string(const Json& j, const std::string& loc) {
  return ObjectReader::convert<std::string>(j, loc);
}

}  // namespace

ScenarioConfig scenario_from_json(const Json& doc, const std::string& origin) {
  ScenarioConfig c;
  ObjectReader root(doc, origin + ":");
  root.get("name", c.name);
  if (const Json* j = root.find("run")) {
    ObjectReader r(*j, root.at("run"));
    r.get("seed", c.run.seed);
    r.get("duration_us", c.run.duration_us);
    r.finish();
  }
  {
    ObjectReader r(root.require("topology"), root.at("topology"));
    read_array(r, "switches", c.topology.switches, parse_string);
    read_array(r, "links", c.topology.links, parse_link);
    read_array(r, "hosts", c.topology.hosts, parse_host);
    r.finish();
  }
  if (const Json* j = root.find("controller")) {
    ObjectReader r(*j, root.at("controller"));
    ControllerSection& s = c.controller;
    r.get("strategy", s.strategy);
    r.get("compute_time_us", s.compute_time_us);
    r.get("control_delay_us", s.control_delay_us);
    r.get("t_qoap_us", s.t_qoap_us);
    r.get("t_qoap_phase_mode", s.t_qoap_phase_mode);
    r.get("t_qoap_phase_us", s.t_qoap_phase_us);
    r.get("t_qoap_phase_strata", s.t_qoap_phase_strata);
    r.get("k_max", s.k_max);
    if (const Json* cj = r.find("congestion")) {
      ObjectReader cr(*cj, r.at("congestion"));
      cr.get("enabled", s.congestion.enabled);
      cr.get("reroute_fraction", s.congestion.reroute_fraction);
      cr.get("cooldown_us", s.congestion.cooldown_us);
      cr.finish();
    }
    r.finish();
  }
  if (const Json* j = root.find("bfd")) {
    ObjectReader r(*j, root.at("bfd"));
    r.get("jitter", c.bfd.jitter);
    read_array(r, "sessions", c.bfd.sessions, [](const Json& sj, const std::string& loc) {
      ObjectReader sr(sj, loc);
      BfdSessionSpec s;
      sr.get("link", s.link, true);
      sr.get("t_i_us", s.t_i_us);
      sr.get("m", s.m);
      sr.get("enabled", s.enabled);
      sr.finish();
      return s;
    });
    r.finish();
  }
  if (const Json* j = root.find("lldp")) {
    ObjectReader r(*j, root.at("lldp"));
    r.get("enabled", c.lldp.enabled);
    r.get("update_interval_us", c.lldp.update_interval_us);
    r.get("detection_factor", c.lldp.detection_factor);
    r.finish();
  }
  read_array(root, "failures", c.failures, [](const Json& fj, const std::string& loc) {
    ObjectReader r(fj, loc);
    FailureSpec f;
    r.get("link", f.link, true);
    r.get("mode", f.mode);
    r.get("at_us", f.at_us, true);
    r.finish();
    return f;
  });
  read_array(root, "cbr", c.cbr, [](const Json& fj, const std::string& loc) {
    ObjectReader r(fj, loc);
    CbrSpec f;
    r.get("id", f.id, true);
    r.get("src", f.src, true);
    r.get("dst", f.dst, true);
    r.get("rate_bps", f.rate_bps, true);
    r.get("packet_bytes", f.packet_bytes);
    r.get("start_us", f.start_us);
    if (const Json* s = r.find("stop_us"); s != nullptr && !s->is_null()) {
      f.stop_us = ObjectReader::convert<int64_t>(*s, r.at("stop_us"));
    }
    r.get("pinned", f.pinned);
    r.finish();
    return f;
  });
  if (const Json* j = root.find("dash"); j != nullptr && !j->is_null()) {
    ObjectReader r(*j, root.at("dash"));
    DashSection d;
    r.get("server", d.server, true);
    r.get("resolution", d.resolution);
    r.get("segment_us", d.segment_us);
    r.get("video_length_us", d.video_length_us);
    r.get("sample_interval_us", d.sample_interval_us);
    if (const Json* aj = r.find("abr")) {
      ObjectReader ar(*aj, r.at("abr"));
      ar.get("ewma_alpha", d.abr.ewma_alpha);
      ar.get("safety_factor", d.abr.safety_factor);
      ar.get("up_switch_segments", d.abr.up_switch_segments);
      ar.get("max_buffer_us", d.abr.max_buffer_us);
      ar.finish();
    }
    if (const Json* tj = r.find("transport")) {
      ObjectReader tr(*tj, r.at("transport"));
      tr.get("window_packets", d.transport.window_packets);
      tr.get("packet_bytes", d.transport.packet_bytes);
      tr.get("initial_rto_us", d.transport.initial_rto_us);
      tr.get("request_timeout_us", d.transport.request_timeout_us);
      tr.finish();
    }
    read_array(r, "clients", d.clients, [](const Json& cj, const std::string& loc) {
      ObjectReader cr(cj, loc);
      DashClientSpec s;
      cr.get("id", s.id, true);
      cr.get("host", s.host, true);
      cr.get("start_us", s.start_us);
      cr.get("start_jitter_us", s.start_jitter_us);
      cr.finish();
      return s;
    });
    r.finish();
    c.dash = d;
  }
  if (const Json* j = root.find("metrics")) {
    ObjectReader r(*j, root.at("metrics"));
    r.get("throughput_bin_us", c.metrics.throughput_bin_us);
    r.get("measured_flow", c.metrics.measured_flow);
    r.get("failure_window_us", c.metrics.failure_window_us);
    r.finish();
  }
  root.finish();
  validate_scenario(c, origin);
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return scenario_from_json(doc, path);
}

Json scenario_to_json(const ScenarioConfig& c) {
  Json j;
  j["name"] = c.name;
  j["run"] = {{"seed", c.run.seed}, {"duration_us", c.run.duration_us}};
  Json topo;
  topo["switches"] = c.topology.switches;
  topo["links"] = Json::array();
  for (const LinkSpec& l : c.topology.links) {
    topo["links"].push_back({{"a", l.a},
                             {"b", l.b},
                             {"capacity_bps", l.capacity_bps},
                             {"delay_us", l.delay_us},
                             {"queue_packets", l.queue_packets}});
  }
  topo["hosts"] = Json::array();
  for (const HostSpec& h : c.topology.hosts) {
    topo["hosts"].push_back({{"name", h.name},
                             {"attach", h.attach},
                             {"capacity_bps", h.capacity_bps},
                             {"delay_us", h.delay_us},
                             {"queue_packets", h.queue_packets}});
  }
  j["topology"] = topo;
  const ControllerSection& s = c.controller;
  j["controller"] = {{"strategy", s.strategy},
                     {"compute_time_us", s.compute_time_us},
                     {"control_delay_us", s.control_delay_us},
                     {"t_qoap_us", s.t_qoap_us},
                     {"t_qoap_phase_mode", s.t_qoap_phase_mode},
                     {"t_qoap_phase_us", s.t_qoap_phase_us},
                     {"t_qoap_phase_strata", s.t_qoap_phase_strata},
                     {"k_max", s.k_max},
                     {"congestion",
                      {{"enabled", s.congestion.enabled},
                       {"reroute_fraction", s.congestion.reroute_fraction},
                       {"cooldown_us", s.congestion.cooldown_us}}}};
  Json sessions = Json::array();
  for (const BfdSessionSpec& b : c.bfd.sessions) {
    sessions.push_back(
        {{"link", b.link}, {"t_i_us", b.t_i_us}, {"m", b.m}, {"enabled", b.enabled}});
  }
  j["bfd"] = {{"jitter", c.bfd.jitter}, {"sessions", sessions}};
  j["lldp"] = {{"enabled", c.lldp.enabled},
               {"update_interval_us", c.lldp.update_interval_us},
               {"detection_factor", c.lldp.detection_factor}};
  j["failures"] = Json::array();
  for (const FailureSpec& f : c.failures) {
    j["failures"].push_back({{"link", f.link}, {"mode", f.mode}, {"at_us", f.at_us}});
  }
  j["cbr"] = Json::array();
  for (const CbrSpec& f : c.cbr) {
    Json fj = {{"id", f.id},
               {"src", f.src},
               {"dst", f.dst},
               {"rate_bps", f.rate_bps},
               {"packet_bytes", f.packet_bytes},
               {"start_us", f.start_us}};
    fj["stop_us"] = f.stop_us ? Json(*f.stop_us) : Json(nullptr);
    fj["pinned"] = f.pinned;
    j["cbr"].push_back(fj);
  }
  if (c.dash) {
    const DashSection& d = *c.dash;
    Json clients = Json::array();
    for (const DashClientSpec& cl : d.clients) {
      clients.push_back({{"id", cl.id},
                         {"host", cl.host},
                         {"start_us", cl.start_us},
                         {"start_jitter_us", cl.start_jitter_us}});
    }
    j["dash"] = {{"server", d.server},
                 {"resolution", d.resolution},
                 {"segment_us", d.segment_us},
                 {"video_length_us", d.video_length_us},
                 {"sample_interval_us", d.sample_interval_us},
                 {"abr",
                  {{"ewma_alpha", d.abr.ewma_alpha},
                   {"safety_factor", d.abr.safety_factor},
                   {"up_switch_segments", d.abr.up_switch_segments},
                   {"max_buffer_us", d.abr.max_buffer_us}}},
                 {"transport",
                  {{"window_packets", d.transport.window_packets},
                   {"packet_bytes", d.transport.packet_bytes},
                   {"initial_rto_us", d.transport.initial_rto_us},
                   {"request_timeout_us", d.transport.request_timeout_us}}},
                 {"clients", clients}};
  } else {
    j["dash"] = nullptr;
  }
  j["metrics"] = {{"throughput_bin_us", c.metrics.throughput_bin_us},
                  {"measured_flow", c.metrics.measured_flow},
                  {"failure_window_us", c.metrics.failure_window_us}};
  return j;
}

namespace {

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) throw ConfigError(where + ": " + what);
}

}  // namespace

void validate_scenario(const ScenarioConfig& c, const std::string& origin) {
  const std::string o = origin + ":";
  require(c.run.duration_us > 0, o + "/run/duration_us", "must be positive");
  Topology topo;
  try {
    topo = build_topology(c.topology);
  } catch (const ConfigError& e) {
    throw ConfigError(o + "/topology: " + e.what());
  }
  auto host = [&](const std::string& name, const std::string& where) {
    auto id = topo.find_node(name);
    require(id.has_value(), where, "unknown host '" + name + "'");
    require(!topo.is_switch(*id), where, "'" + name + "' is a switch, expected a host");
    return *id;
  };
  auto link = [&](const std::string& name, const std::string& where) {
    auto id = topo.find_link(name);
    require(id.has_value(), where, "unknown link '" + name + "'");
    return *id;
  };
  const ControllerSection& s = c.controller;
  const std::string cl = o + "/controller";
  try {
    parse_strategy(s.strategy);
  } catch (const ConfigError& e) {
    throw ConfigError(cl + "/strategy: " + e.what());
  }
  require(s.compute_time_us >= 0, cl + "/compute_time_us", "must not be negative");
  require(s.control_delay_us >= 0, cl + "/control_delay_us", "must not be negative");
  require(s.t_qoap_us > 0, cl + "/t_qoap_us", "must be positive");
  require(s.t_qoap_phase_mode == "fixed" || s.t_qoap_phase_mode == "stratified",
          cl + "/t_qoap_phase_mode", "expected 'fixed' or 'stratified'");
  require(s.t_qoap_phase_us >= 0, cl + "/t_qoap_phase_us", "must not be negative");
  require(s.t_qoap_phase_strata > 0, cl + "/t_qoap_phase_strata", "must be positive");
  require(s.k_max > 0, cl + "/k_max", "must be positive");
  require(s.congestion.reroute_fraction > 0 && s.congestion.reroute_fraction <= 1,
          cl + "/congestion/reroute_fraction", "must lie in (0, 1]");
  require(s.congestion.cooldown_us >= 0, cl + "/congestion/cooldown_us",
          "must not be negative");
  std::set<std::string> bfd_links;
  for (size_t i = 0; i < c.bfd.sessions.size(); ++i) {
    const BfdSessionSpec& b = c.bfd.sessions[i];
    const std::string where = o + "/bfd/sessions/" + std::to_string(i);
    const LinkId l = link(b.link, where + "/link");
    require(topo.link(l).inter_switch, where + "/link",
            "BFD needs switches at both ends of '" + b.link + "'");
    require(b.t_i_us > 0, where + "/t_i_us", "must be positive");
    require(bfd_links.insert(topo.link(l).name).second, where + "/link",
            "duplicate session on '" + b.link + "'");
  }
  require(c.lldp.update_interval_us > 0, o + "/lldp/update_interval_us", "must be positive");
  require(c.lldp.detection_factor > 0, o + "/lldp/detection_factor", "must be positive");
  for (size_t i = 0; i < c.failures.size(); ++i) {
    const FailureSpec& f = c.failures[i];
    const std::string where = o + "/failures/" + std::to_string(i);
    link(f.link, where + "/link");
    try {
      parse_failure_mode(f.mode);
    } catch (const ConfigError& e) {
      throw ConfigError(where + "/mode: " + e.what());
    }
    require(f.at_us >= 0, where + "/at_us", "must not be negative");
  }
  std::set<std::string> flow_ids;
  std::set<std::pair<std::string, std::string>> pairs;
  for (size_t i = 0; i < c.cbr.size(); ++i) {
    const CbrSpec& f = c.cbr[i];
    const std::string where = o + "/cbr/" + std::to_string(i);
    require(!f.id.empty(), where + "/id", "must not be empty");
    require(flow_ids.insert(f.id).second, where + "/id", "duplicate flow id '" + f.id + "'");
    host(f.src, where + "/src");
    host(f.dst, where + "/dst");
    require(f.src != f.dst, where + "/dst", "equals the source");
    require(pairs.insert({f.src, f.dst}).second, where,
            "another CBR flow already uses this host pair");
    require(f.rate_bps > 0, where + "/rate_bps", "must be positive");
    require(f.packet_bytes > 0, where + "/packet_bytes", "must be positive");
    require(f.start_us >= 0, where + "/start_us", "must not be negative");
    require(!f.stop_us || *f.stop_us > f.start_us, where + "/stop_us",
            "must be after start_us");
  }
  if (c.dash) {
    const DashSection& d = *c.dash;
    const std::string dl = o + "/dash";
    const NodeId server = host(d.server, dl + "/server");
    try {
      parse_resolution(d.resolution);
    } catch (const ConfigError& e) {
      throw ConfigError(dl + "/resolution: " + e.what());
    }
    require(d.segment_us > 0, dl + "/segment_us", "must be positive");
    require(d.video_length_us >= d.segment_us, dl + "/video_length_us",
            "must hold at least one segment");
    require(d.sample_interval_us > 0, dl + "/sample_interval_us", "must be positive");
    require(d.abr.ewma_alpha > 0 && d.abr.ewma_alpha <= 1, dl + "/abr/ewma_alpha",
            "must lie in (0, 1]");
    require(d.abr.safety_factor > 0 && d.abr.safety_factor <= 1, dl + "/abr/safety_factor",
            "must lie in (0, 1]");
    require(d.abr.max_buffer_us >= d.segment_us, dl + "/abr/max_buffer_us",
            "must hold at least one segment");
    require(d.transport.window_packets > 0, dl + "/transport/window_packets",
            "must be positive");
    require(d.transport.packet_bytes >= 64, dl + "/transport/packet_bytes",
            "must be at least 64");
    require(d.transport.initial_rto_us > 0, dl + "/transport/initial_rto_us",
            "must be positive");
    require(d.transport.request_timeout_us > 0, dl + "/transport/request_timeout_us",
            "must be positive");
    std::set<std::string> ids, hosts;
    for (size_t i = 0; i < d.clients.size(); ++i) {
      const DashClientSpec& cs = d.clients[i];
      const std::string where = dl + "/clients/" + std::to_string(i);
      require(!cs.id.empty(), where + "/id", "must not be empty");
      require(ids.insert(cs.id).second, where + "/id", "duplicate client id '" + cs.id + "'");
      const NodeId h = host(cs.host, where + "/host");
      require(h != server, where + "/host", "client cannot run on the server host");
      require(hosts.insert(cs.host).second, where + "/host",
              "another client already uses host '" + cs.host + "'");
      require(cs.start_us >= 0 && cs.start_jitter_us >= 0, where,
              "start times must not be negative");
    }
  }
  require(c.metrics.throughput_bin_us > 0, o + "/metrics/throughput_bin_us",
          "must be positive");
  require(c.metrics.failure_window_us >= 0, o + "/metrics/failure_window_us",
          "must not be negative");
  if (!c.metrics.measured_flow.empty()) {
    require(flow_ids.count(c.metrics.measured_flow) > 0, o + "/metrics/measured_flow",
            "unknown CBR flow '" + c.metrics.measured_flow + "'");
  }
}

TopologySection canonical_topology(uint64_t switch_capacity_bps,
                                   const std::vector<HostSpec>& hosts) {
  TopologySection t;
  for (int i = 1; i <= 6; ++i) t.switches.push_back("S" + std::to_string(i));
  const int pairs[][2] = {{1, 2}, {2, 5}, {2, 3}, {3, 5}, {5, 6}, {3, 4}, {4, 5}};
  for (const auto& p : pairs) {
    LinkSpec l;
    l.a = "S" + std::to_string(p[0]);
    l.b = "S" + std::to_string(p[1]);
    l.capacity_bps = switch_capacity_bps;
    t.links.push_back(l);
  }
  t.hosts = hosts;
  return t;
}

Topology build_topology(const TopologySection& section) {
  Topology topo;
  for (const std::string& s : section.switches) topo.add_switch(s);
  auto lookup = [&](const std::string& name, bool want_switch) {
    auto id = topo.find_node(name);
    if (!id) throw ConfigError("unknown node '" + name + "'");
    if (want_switch && !topo.is_switch(*id)) {
      throw ConfigError("'" + name + "' is not a switch");
    }
    return *id;
  };
  for (const LinkSpec& l : section.links) {
    topo.add_link(lookup(l.a, true), lookup(l.b, true),
                  LinkParams{l.capacity_bps, SimTime::from_us(l.delay_us), l.queue_packets});
  }
  for (const HostSpec& h : section.hosts) {
    const NodeId sw = lookup(h.attach, true);
    const NodeId id = topo.add_host(h.name);
    topo.add_link(id, sw,
                  LinkParams{h.capacity_bps, SimTime::from_us(h.delay_us), h.queue_packets});
  }
  return topo;
}

}  // namespace sdnft
