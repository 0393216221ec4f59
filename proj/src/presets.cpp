#include "sdnft/presets.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "sdnft/errors.hpp"

namespace sdnft {
namespace {

constexpr uint64_t kMbps = 1'000'000;
constexpr int64_t kMs = 1000;
constexpr int64_t kSec = 1'000'000;
constexpr uint64_t kSwitchLinkCapacity = 50 * kMbps;

HostSpec host(const std::string& name, const std::string& attach) {
  HostSpec h;
  h.name = name;
  h.attach = attach;
  return h;
}

CbrSpec cbr(const std::string& id, const std::string& src, const std::string& dst,
            uint64_t rate_bps, int64_t start_us) {
  CbrSpec f;
  f.id = id;
  f.src = src;
  f.dst = dst;
  f.rate_bps = rate_bps;
  f.start_us = start_us;
  return f;
}

std::vector<BfdSessionSpec> bfd_on_all_links(const TopologySection& topo, int64_t t_i_us,
                                             uint32_t m) {
  std::vector<BfdSessionSpec> out;
  for (const LinkSpec& l : topo.links) {
    out.push_back(BfdSessionSpec{l.a + "-" + l.b, t_i_us, m, true});
  }
  return out;
}

std::vector<uint64_t> seeds(uint64_t n) {
  std::vector<uint64_t> s;
  for (uint64_t i = 1; i <= n; ++i) s.push_back(i);
  return s;
}

// Measured flow S1 -> S6 over the primary path S1-S2-S5-S6, failure of S2-S5
// at 26 s, and a pinned cross-traffic flow saturating S3 -> S5 (a hop of the
// secondary path) from 10 s.
ScenarioConfig dpqoap_base(const std::string& strategy, int64_t t_qoap_us) {
  ScenarioConfig c;
  c.run.duration_us = 50 * kSec;
  c.topology = canonical_topology(kSwitchLinkCapacity,
                                  {host("h1", "S1"), host("h6", "S6"), host("x3", "S3"),
                                   host("x5", "S5")});
  c.controller.strategy = strategy;
  c.controller.t_qoap_us = t_qoap_us;
  c.controller.t_qoap_phase_mode = "stratified";
  c.cbr.push_back(cbr("main", "h1", "h6", 30 * kMbps, 0));
  CbrSpec cross = cbr("cross", "x3", "x5", 52 * kMbps, 10 * kSec);
  cross.pinned = true;
  c.cbr.push_back(cross);
  c.failures.push_back(FailureSpec{"S2-S5", "port_down", 26 * kSec});
  c.metrics.measured_flow = "main";
  return c;
}

Sweep fig9() {
  Sweep s;
  s.preset = "fig9_dpqoap_vs_static";
  s.description =
      "Throughput of a protected flow when the secondary path is congested at 10 s and "
      "the primary link S2-S5 goes down at 26 s: static protection vs DPQoAP (T_qoap 2 s)";
  s.seeds = seeds(6);
  for (const std::string strategy : {"static_protection", "dpqoap"}) {
    ScenarioConfig c = dpqoap_base(strategy, 2 * kSec);
    c.name = s.preset + "/" + strategy;
    s.cases.push_back(SweepCase{strategy, c});
  }
  return s;
}

Sweep fig13() {
  Sweep s;
  s.preset = "fig13_tqoap_sweep";
  s.description = "Packet loss of the protected flow under DPQoAP for T_qoap in {10, 7, 4, 2} s";
  s.seeds = seeds(6);
  for (int64_t t : {10, 7, 4, 2}) {
    ScenarioConfig c = dpqoap_base("dpqoap", t * kSec);
    const std::string name = "tqoap" + std::to_string(t) + "s";
    c.name = s.preset + "/" + name;
    s.cases.push_back(SweepCase{name, c});
  }
  return s;
}

ScenarioConfig failure_base(const std::string& strategy, const std::string& mode,
                            int64_t failure_us, int64_t duration_us) {
  ScenarioConfig c;
  c.run.duration_us = duration_us;
  c.topology = canonical_topology(kSwitchLinkCapacity, {host("h1", "S1"), host("h6", "S6")});
  c.controller.strategy = strategy;
  c.failures.push_back(FailureSpec{"S2-S5", mode, failure_us});
  return c;
}

Sweep fig10_11() {
  Sweep s;
  s.preset = "fig10_11_failure_modes";
  s.description =
      "Recovery of a single 10 Mb/s flow after S2-S5 fails at 15 s: port-down vs transparent "
      "cut, restoration vs protection, without BFD and with BFD (T_i 5 ms, M 2)";
  s.seeds = seeds(6);
  for (const std::string strategy : {"restoration", "static_protection"}) {
    for (const std::string mode : {"port_down", "transparent_cut"}) {
      for (bool with_bfd : {false, true}) {
        ScenarioConfig c = failure_base(strategy, mode, 15 * kSec, 60 * kSec);
        if (with_bfd) c.bfd.sessions = bfd_on_all_links(c.topology, 5 * kMs, 2);
        c.cbr.push_back(cbr("main", "h1", "h6", 10 * kMbps, 0));
        c.metrics.measured_flow = "main";
        const std::string name =
            strategy + "/" + mode + "/" + (with_bfd ? "bfd5ms" : "no_bfd");
        c.name = s.preset + "/" + name;
        s.cases.push_back(SweepCase{name, c});
      }
    }
  }
  return s;
}

Sweep fig12() {
  Sweep s;
  s.preset = "fig12_bfd_sweep";
  s.description =
      "Packet loss of a protected 10 Mb/s flow after a transparent cut of S2-S5 at 15 s for "
      "BFD detection times {15, 30, 45, 60, 90} ms (M 2)";
  s.seeds = seeds(6);
  for (int64_t td : {15, 30, 45, 60, 90}) {
    ScenarioConfig c = failure_base("static_protection", "transparent_cut", 15 * kSec, 20 * kSec);
    c.bfd.sessions = bfd_on_all_links(c.topology, td * kMs / 3, 2);
    c.cbr.push_back(cbr("main", "h1", "h6", 10 * kMbps, 0));
    c.metrics.measured_flow = "main";
    const std::string name = "td" + std::to_string(td) + "ms";
    c.name = s.preset + "/" + name;
    s.cases.push_back(SweepCase{name, c});
  }
  return s;
}

DashSection dash_section(const std::string& server, int64_t segment_us,
                         const std::vector<std::pair<std::string, std::string>>& clients,
                         int64_t start_jitter_us) {
  DashSection d;
  d.server = server;
  d.resolution = "1080p";
  d.segment_us = segment_us;
  d.video_length_us = 600 * kSec;
  for (const auto& [id, h] : clients) {
    DashClientSpec cs;
    cs.id = id;
    cs.host = h;
    cs.start_jitter_us = start_jitter_us;
    d.clients.push_back(cs);
  }
  return d;
}

Sweep fig14() {
  Sweep s;
  s.preset = "fig14_qoe_failure";
  s.description =
      "QoE of a DASH client (600 s video, S1 -> server at S6) when S2-S5 fails at 300 s, for "
      "both strategies, both failure modes and 1 s / 10 s segments";
  s.seeds = seeds(6);
  for (const std::string strategy : {"restoration", "static_protection"}) {
    for (const std::string mode : {"port_down", "transparent_cut"}) {
      for (int64_t seg : {1, 10}) {
        ScenarioConfig c = failure_base(strategy, mode, 300 * kSec, 660 * kSec);
        c.topology.hosts = {host("c1", "S1"), host("vs", "S6")};
        c.dash = dash_section("vs", seg * kSec, {{"c1", "c1"}}, 1 * kSec);
        const std::string name = strategy + "/" + mode + "/seg" + std::to_string(seg) + "s";
        c.name = s.preset + "/" + name;
        s.cases.push_back(SweepCase{name, c});
      }
    }
  }
  return s;
}

Sweep congestion() {
  Sweep s;
  s.preset = "congestion_factorial";
  s.description =
      "Five DASH clients at S1 streaming from S6 while four CBR flows from a server at S5 to "
      "T1-T4 at S2 load S5 -> S2; load x segment size x BFD interval, restoration with "
      "BFD-driven congestion rerouting";
  s.seeds = seeds(6);
  for (uint64_t load : {40, 45, 49}) {
    for (int64_t seg : {1, 10}) {
      for (int64_t t_i_ms : {0, 100, 1000}) {
        ScenarioConfig c;
        c.run.duration_us = 650 * kSec;
        std::vector<HostSpec> hosts;
        std::vector<std::pair<std::string, std::string>> clients;
        for (int i = 1; i <= 5; ++i) {
          const std::string name = "c" + std::to_string(i);
          hosts.push_back(host(name, "S1"));
          clients.emplace_back(name, name);
        }
        hosts.push_back(host("vs", "S6"));
        hosts.push_back(host("is", "S5"));
        for (int i = 1; i <= 4; ++i) hosts.push_back(host("t" + std::to_string(i), "S2"));
        c.topology = canonical_topology(kSwitchLinkCapacity, hosts);
        c.controller.strategy = "restoration";
        c.lldp.enabled = false;
        if (t_i_ms > 0) {
          c.bfd.sessions = bfd_on_all_links(c.topology, t_i_ms * kMs, 2);
          c.controller.congestion.enabled = true;
        }
        const int64_t starts[] = {50 * kSec, 80 * kSec, 110 * kSec, 110 * kSec};
        for (int i = 1; i <= 4; ++i) {
          CbrSpec f = cbr("iperf" + std::to_string(i), "is", "t" + std::to_string(i),
                          load * kMbps / 4, starts[i - 1]);
          f.stop_us = 620 * kSec;
          c.cbr.push_back(f);
        }
        c.dash = dash_section("vs", seg * kSec, clients, 2 * kSec);
        const std::string name = "load" + std::to_string(load) + "/seg" + std::to_string(seg) +
                                 "s/" +
                                 (t_i_ms == 0 ? std::string("no_bfd")
                                              : "bfd" + std::to_string(t_i_ms) + "ms");
        c.name = s.preset + "/" + name;
        s.cases.push_back(SweepCase{name, c});
      }
    }
  }
  return s;
}

}  // namespace

ScenarioConfig Sweep::run_config(size_t case_index, uint64_t seed) const {
  ScenarioConfig c = cases.at(case_index).config;
  c.run.seed = seed;
  return c;
}

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{
      "fig9_dpqoap_vs_static", "fig10_11_failure_modes", "fig12_bfd_sweep",
      "fig13_tqoap_sweep",     "fig14_qoe_failure",      "congestion_factorial"};
  return ids;
}

Sweep make_preset(const std::string& id) {
  Sweep s;
  if (id == "fig9_dpqoap_vs_static") {
    s = fig9();
  } else if (id == "fig10_11_failure_modes") {
    s = fig10_11();
  } else if (id == "fig12_bfd_sweep") {
    s = fig12();
  } else if (id == "fig13_tqoap_sweep") {
    s = fig13();
  } else if (id == "fig14_qoe_failure") {
    s = fig14();
  } else if (id == "congestion_factorial") {
    s = congestion();
  } else {
    throw ConfigError("unknown preset '" + id + "'");
  }
  for (const SweepCase& c : s.cases) validate_scenario(c.config, s.preset + "/" + c.name);
  return s;
}

Json sweep_to_json(const Sweep& sweep) {
  Json j;
  j["preset"] = sweep.preset;
  j["description"] = sweep.description;
  j["seeds"] = sweep.seeds;
  j["cases"] = Json::array();
  for (const SweepCase& c : sweep.cases) {
    j["cases"].push_back({{"case", c.name}, {"scenario", scenario_to_json(c.config)}});
  }
  return j;
}

Sweep sweep_from_json(const Json& doc, const std::string& origin) {
  auto fail = [&](const std::string& where, const std::string& what) {
    throw ConfigError(origin + ":" + where + ": " + what);
  };
  if (!doc.is_object()) fail("", "expected an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    if (k != "preset" && k != "description" && k != "seeds" && k != "cases") {
      fail("/" + k, "unknown key");
    }
  }
  Sweep s;
  if (!doc.contains("preset") || !doc["preset"].is_string()) fail("/preset", "expected a string");
  s.preset = doc["preset"].get<std::string>();
  if (doc.contains("description")) s.description = doc["description"].get<std::string>();
  if (!doc.contains("seeds") || !doc["seeds"].is_array()) fail("/seeds", "expected an array");
  for (const Json& seed : doc["seeds"]) {
    if (!seed.is_number_unsigned()) fail("/seeds", "expected non-negative integers");
    s.seeds.push_back(seed.get<uint64_t>());
  }
  if (!doc.contains("cases") || !doc["cases"].is_array()) fail("/cases", "expected an array");
  for (size_t i = 0; i < doc["cases"].size(); ++i) {
    const Json& c = doc["cases"][i];
    const std::string where = "/cases/" + std::to_string(i);
    if (!c.is_object() || !c.contains("case") || !c.contains("scenario")) {
      fail(where, "expected {\"case\", \"scenario\"}");
    }
    for (auto it = c.begin(); it != c.end(); ++it) {
      if (it.key() != "case" && it.key() != "scenario") fail(where + "/" + it.key(), "unknown key");
    }
    s.cases.push_back(SweepCase{c["case"].get<std::string>(),
                                scenario_from_json(c["scenario"], origin + where)});
  }
  return s;
}

std::string golden_preset_path(const std::string& id) {
  return std::string(SDNFT_PRESET_DIR) + "/golden/" + id + ".json";
}

std::vector<RunResult> run_sweep(const Sweep& sweep, unsigned jobs, const ProgressFn& progress) {
  const size_t total = sweep.run_count();
  std::vector<RunResult> results(total);
  std::atomic<size_t> next{0};
  std::mutex progress_mutex;
  size_t done = 0;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= total) return;
      const size_t case_index = i / sweep.seeds.size();
      const uint64_t seed = sweep.seeds[i % sweep.seeds.size()];
      try {
        results[i] = run_scenario(sweep.run_config(case_index, seed), sweep.cases[case_index].name);
      } catch (...) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        if (!error) error = std::current_exception();
        next = total;
        return;
      }
      std::lock_guard<std::mutex> lock(progress_mutex);
      ++done;
      if (progress) progress(done, total, results[i]);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(total)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < n; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace sdnft
