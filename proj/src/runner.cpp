#include "sdnft/runner.hpp"

#include <fmt/format.h>

#include "sdnft/errors.hpp"
#include "sdnft/lldp.hpp"

namespace sdnft {

const FlowResult* RunResult::flow(const std::string& id) const {
  for (const FlowResult& f : flows) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

const FlowResult* RunResult::measured_flow() const {
  if (!config.metrics.measured_flow.empty()) return flow(config.metrics.measured_flow);
  return flows.empty() ? nullptr : &flows.front();
}

namespace {

SimTime us(int64_t v) { return SimTime::from_us(v); }

SimTime qoap_phase(const ControllerSection& s, uint64_t seed) {
  if (s.t_qoap_phase_mode != "stratified") return us(s.t_qoap_phase_us);
  const uint64_t r = (seed == 0 ? 0 : seed - 1) % s.t_qoap_phase_strata;
  // (r + 0.5) / strata * t_qoap, rounded down to a microsecond.
  return us(static_cast<int64_t>((2 * r + 1) * static_cast<uint64_t>(s.t_qoap_us) /
                                 (2 * s.t_qoap_phase_strata)));
}

void check_conservation(const Network& net, const CbrTraffic& cbr,
                        const std::optional<DashSystem>& dash, const DashSection* dash_cfg,
                        std::vector<std::string>& violations) {
  const NetworkCounters& c = net.counters();
  uint64_t drops = 0, data_drops = 0;
  for (int i = 0; i < kDropReasonCount; ++i) {
    drops += c.drops[i];
    data_drops += c.data_drops[i];
  }
  if (c.created != c.consumed + drops + net.packets_in_transit()) {
    violations.push_back(fmt::format(
        "packet conservation: created {} != consumed {} + dropped {} + in transit {}",
        c.created, c.consumed, drops, net.packets_in_transit()));
  }
  uint64_t flow_in_flight = 0;
  for (size_t i = 0; i < cbr.flow_count(); ++i) {
    const FlowStats& s = cbr.stats(i);
    if (s.received() + s.lost() > s.sent()) {
      violations.push_back(fmt::format("flow {}: received {} + lost {} exceeds sent {}",
                                       cbr.config(i).id, s.received(), s.lost(), s.sent()));
      continue;
    }
    flow_in_flight += s.in_flight();
    uint64_t binned = 0;
    for (uint64_t b : s.bins()) binned += b;
    if (binned != s.bits_received()) {
      violations.push_back(fmt::format("flow {}: throughput bins integrate to {} bits, {} received",
                                       cbr.config(i).id, binned, s.bits_received()));
    }
  }
  if (flow_in_flight != net.data_in_transit()) {
    violations.push_back(fmt::format("data packets in flight: flows report {}, network holds {}",
                                     flow_in_flight, net.data_in_transit()));
  }
  if (dash) {
    const SimTime limit = us(dash_cfg->abr.max_buffer_us) + us(dash_cfg->segment_us);
    for (size_t i = 0; i < dash->client_count(); ++i) {
      const DashClient& cl = dash->client(i);
      const SimTime level = cl.buffer_level();
      if (cl.downloaded() - cl.played() != level) {
        violations.push_back(fmt::format(
            "client {}: buffer {} != downloaded {} - played {}", cl.config().id,
            level.to_string(), cl.downloaded().to_string(), cl.played().to_string()));
      }
      for (const BufferSample& b : cl.buffer_samples()) {
        if (b.level < SimTime::zero() || b.level > limit) {
          violations.push_back(fmt::format("client {}: buffer {} out of range at {}",
                                           cl.config().id, b.level.to_string(),
                                           b.t.to_string()));
          break;
        }
      }
    }
  }
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const std::string& case_name) {
  validate_scenario(config, case_name.empty() ? config.name : case_name);
  RunResult result;
  result.case_name = case_name.empty() ? config.name : case_name;
  result.seed = config.run.seed;
  result.config = config;

  const Topology topo = build_topology(config.topology);
  Simulator sim(config.run.seed);
  Network net(sim, topo);
  ControlChannel channel(sim, us(config.controller.control_delay_us));

  ControllerConfig cc;
  cc.strategy = parse_strategy(config.controller.strategy);
  cc.compute_time = us(config.controller.compute_time_us);
  cc.t_qoap = us(config.controller.t_qoap_us);
  cc.t_qoap_phase = qoap_phase(config.controller, config.run.seed);
  cc.k_max = config.controller.k_max;
  cc.congestion.enabled = config.controller.congestion.enabled;
  cc.congestion.reroute_fraction = config.controller.congestion.reroute_fraction;
  cc.congestion.cooldown = us(config.controller.congestion.cooldown_us);
  Controller controller(sim, net, channel, cc);

  net.set_port_status_listener([&](NodeId sw, PortId port, bool up) {
    channel.to_controller([&controller, sw, port, up] { controller.on_port_status(sw, port, up); });
  });

  BfdManager bfd(sim, net, config.bfd.jitter);
  for (const BfdSessionSpec& s : config.bfd.sessions) {
    bfd.add_session(BfdSessionConfig{*topo.find_link(s.link), us(s.t_i_us), s.m, s.enabled});
  }
  bfd.set_listener([&](const BfdTransition& t) {
    channel.to_controller([&controller, t] { controller.on_bfd_transition(t); });
  });

  LldpMonitor lldp(sim, net, channel,
                   LldpConfig{us(config.lldp.update_interval_us), config.lldp.detection_factor,
                              config.lldp.enabled});
  lldp.set_listener([&](LinkId link) { controller.on_lldp_link_failed(link); });

  CbrTraffic cbr(sim, net, us(config.metrics.throughput_bin_us));
  for (const CbrSpec& f : config.cbr) {
    CbrConfig fc;
    fc.id = f.id;
    fc.src = *topo.find_node(f.src);
    fc.dst = *topo.find_node(f.dst);
    fc.rate_bps = f.rate_bps;
    fc.packet_bytes = f.packet_bytes;
    fc.start = us(f.start_us);
    if (f.stop_us) fc.stop = us(*f.stop_us);
    cbr.add_flow(fc);
    controller.add_flow(FlowKey{fc.src, fc.dst, tags::kCbr}, f.pinned);
  }
  net.set_drop_listener([&](const Packet& p, DropReason) {
    if (p.kind == PacketKind::kData && p.flow.tag == tags::kCbr) cbr.on_drop(p);
    if (p.kind == PacketKind::kBfdCtrl || p.kind == PacketKind::kBfdEcho) {
      ++result.bfd_packets_dropped;
    }
  });

  std::optional<DashSystem> dash;
  if (config.dash) {
    const DashSection& d = *config.dash;
    const NodeId server = *topo.find_node(d.server);
    AbrConfig abr{d.abr.ewma_alpha, d.abr.safety_factor, d.abr.up_switch_segments,
                  us(d.abr.max_buffer_us)};
    TransportConfig tc;
    tc.window_packets = d.transport.window_packets;
    tc.packet_bytes = d.transport.packet_bytes;
    tc.initial_rto = us(d.transport.initial_rto_us);
    tc.request_timeout = us(d.transport.request_timeout_us);
    dash.emplace(sim, net, server,
                 make_mpd(parse_resolution(d.resolution), us(d.segment_us),
                          us(d.video_length_us)),
                 abr, tc, us(d.sample_interval_us));
    for (const DashClientSpec& c : d.clients) {
      int64_t start = c.start_us;
      if (c.start_jitter_us > 0) {
        std::uniform_int_distribution<int64_t> jitter(0, c.start_jitter_us);
        start += jitter(sim.rng());
      }
      const NodeId host = *topo.find_node(c.host);
      dash->add_client(DashClientConfig{c.id, host, us(start)});
      controller.add_flow(FlowKey{server, host, tags::kDash});
      controller.add_flow(FlowKey{host, server, tags::kDash});
    }
  }

  for (const FailureSpec& f : config.failures) {
    const LinkId link = *topo.find_link(f.link);
    const FailureMode mode = parse_failure_mode(f.mode);
    const SimTime at = us(f.at_us);
    if (!result.failure_at || at < *result.failure_at) result.failure_at = at;
    sim.call_at(at, EventKind::kFailureInjection, [&net, &result, &topo, link, mode, &sim] {
      if (net.inject_failure(link, mode)) {
        result.series.push_back(SeriesRow{sim.now(), "failure", topo.link(link).name,
                                          mode == FailureMode::kPortDown ? 1.0 : 2.0});
      }
    });
  }

  controller.start();
  bfd.start();
  lldp.start();
  cbr.start();
  if (dash) dash->start();

  const SimTime horizon = us(config.run.duration_us);
  result.events = sim.run_until(horizon);

  // Collect measurements.
  std::optional<SimTime> window;
  if (config.metrics.failure_window_us > 0) window = us(config.metrics.failure_window_us);
  for (size_t i = 0; i < cbr.flow_count(); ++i) {
    FlowResult fr{cbr.config(i).id, cbr.stats(i), packet_loss(cbr.stats(i)), std::nullopt};
    if (result.failure_at) {
      const SimTime stop = cbr.config(i).stop;
      fr.recovery_gap = recovery_gap(cbr.stats(i), *result.failure_at,
                                     window.value_or(SimTime::infinity()),
                                     std::min(horizon, stop));
    }
    const std::vector<uint64_t>& bins = cbr.stats(i).bins();
    const SimTime bin = cbr.stats(i).bin_width();
    const int64_t bin_count = horizon.us() / bin.us();
    for (int64_t b = 0; b < bin_count; ++b) {
      const uint64_t bits = static_cast<size_t>(b) < bins.size() ? bins[b] : 0;
      result.series.push_back(SeriesRow{bin * b, "throughput_bps", fr.id,
                                        static_cast<double>(bits) / bin.seconds()});
    }
    result.flows.push_back(std::move(fr));
  }
  if (dash) {
    for (size_t i = 0; i < dash->client_count(); ++i) {
      const DashClient& cl = dash->client(i);
      ClientResult cr{cl.config().id, cl.samples(), cl.buffer_samples(), cl.stalls(),
                      cl.stall_count(), cl.stall_time()};
      for (const QoeSample& s : cl.samples()) result.qoe.push_back(QoeRow{cl.config().id, s});
      for (const BufferSample& b : cl.buffer_samples()) {
        result.series.push_back(SeriesRow{b.t, "buffer_s", cl.config().id, b.level.seconds()});
        result.series.push_back(
            SeriesRow{b.t, "playing_quality", cl.config().id, b.playing_quality});
      }
      result.clients.push_back(std::move(cr));
    }
    result.qoe_report = dash->report();
    result.dash_retransmissions = dash->retransmissions();
  }
  for (const BfdTransition& t : bfd.transitions()) {
    result.series.push_back(SeriesRow{t.at, "bfd_up", topo.link(t.link).name + "@" + topo.name(t.sw),
                                      t.state == BfdState::kUp ? 1.0 : 0.0});
  }
  for (const ControllerEvent& e : controller.events()) {
    result.series.push_back(SeriesRow{e.at, e.kind, e.entity, e.value});
  }
  result.bfd_transitions = bfd.transitions();
  result.lldp_failures = lldp.failures();
  result.reroutes = controller.reroutes();
  result.network = net.counters();
  result.controller = controller.stats();
  check_conservation(net, cbr, dash, config.dash ? &*config.dash : nullptr, result.violations);
  std::stable_sort(result.series.begin(), result.series.end(),
                   [](const SeriesRow& a, const SeriesRow& b) { return a.t < b.t; });
  return result;
}

}  // namespace sdnft
