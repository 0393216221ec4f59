// Acceptance suite: runs the experiment presets and checks each acceptance
// criterion, printing one PASS/FAIL line per criterion. Exit status is
// nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <fmt/format.h>

#include "sdnft/bfd.hpp"
#include "sdnft/paths.hpp"
#include "sdnft/presets.hpp"
#include "sdnft/quality_model.hpp"
#include "sdnft/report.hpp"
#include "sdnft/runner.hpp"

namespace sdnft {
namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Every run made by the suite, for the conservation criterion.
std::vector<std::string> g_violations;
size_t g_runs_checked = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct SweepRun {
  Sweep sweep;
  std::vector<RunResult> runs;
  double wall_s = 0;

  std::vector<const RunResult*> of(const std::string& case_name) const {
    std::vector<const RunResult*> out;
    for (const RunResult& r : runs) {
      if (r.case_name == case_name) out.push_back(&r);
    }
    return out;
  }
};

SweepRun run_preset(const std::string& id, std::optional<size_t> seed_count = std::nullopt) {
  SweepRun s{make_preset(id), {}, 0};
  if (seed_count) s.sweep.seeds.resize(std::min(s.sweep.seeds.size(), *seed_count));
  const auto start = Clock::now();
  s.runs = run_sweep(s.sweep);
  s.wall_s = seconds_since(start);
  for (const RunResult& r : s.runs) {
    ++g_runs_checked;
    for (const std::string& v : r.violations) {
      g_violations.push_back(fmt::format("{} [{} seed {}]: {}", id, r.case_name, r.seed, v));
    }
  }
  return s;
}

double mean(const std::vector<double>& v) {
  double sum = 0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

std::string join(const std::vector<double>& v, const char* format) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += " ";
    out += fmt::format(fmt::runtime(format), v[i]);
  }
  return out;
}

// Seed-averaged recovery gap in ms; absent if any seed never recovered.
std::optional<double> mean_gap_ms(const SweepRun& s, const std::string& case_name) {
  std::vector<double> gaps;
  for (const RunResult* r : s.of(case_name)) {
    const FlowResult* f = r->measured_flow();
    if (f == nullptr || !f->recovery_gap) return std::nullopt;
    gaps.push_back(f->recovery_gap->us() / 1000.0);
  }
  return mean(gaps);
}

std::string gap_text(const std::optional<double>& ms) {
  return ms ? fmt::format("{:.2f} ms", *ms) : std::string("never");
}

double loss_of(const RunResult& r) { return r.measured_flow()->loss.value_or(0); }

// 1. Detection-time formula.
Verdict detection_time() {
  const SimTime a = compute_detection_time(SimTime::from_ms(100), 2);
  const SimTime b = compute_detection_time(SimTime::from_ms(1000), 2);
  return {a == SimTime::from_ms(300) && b == SimTime::from_ms(3000),
          fmt::format("(100 ms, 2) -> {} us, (1000 ms, 2) -> {} us", a.us(), b.us())};
}

// 2. Quality model against a 50-digit evaluation of a * x^b + c (x in kbit/s).
Verdict quality_model() {
  using Big = boost::multiprecision::cpp_dec_float_50;
  double worst = 0;
  bool increasing = true;
  bool in_range = true;
  size_t points = 0;
  for (Resolution res : {Resolution::k1080p, Resolution::k720p, Resolution::k360p}) {
    const QualityCoefficients k = quality_coefficients(res);
    double prev = -1;
    for (uint32_t kbps : bitrate_ladder(res)) {
      const double q = video_quality(kbps, res);
      Big exact = Big(k.a) * pow(Big(kbps), Big(k.b)) + Big(k.c);
      exact = std::clamp(exact, Big(kMinQuality), Big(1));
      worst = std::max(worst, std::abs(q - exact.convert_to<double>()));
      increasing = increasing && q > prev;
      in_range = in_range && q > 0 && q <= 1;
      prev = q;
      ++points;
    }
  }
  return {increasing && in_range && worst <= 1e-9,
          fmt::format("{} ladder points, increasing={}, in (0,1]={}, max |error|={:.3g}", points,
                      increasing, in_range, worst)};
}

// 3. Failure-mode separation.
Verdict failure_modes() {
  const SweepRun s = run_preset("fig10_11_failure_modes");
  bool ok = s.wall_s < 30;
  std::string detail;
  // (a) PortDown.
  for (const char* bfd : {"no_bfd", "bfd5ms"}) {
    const auto prot = mean_gap_ms(s, fmt::format("static_protection/port_down/{}", bfd));
    const auto rest = mean_gap_ms(s, fmt::format("restoration/port_down/{}", bfd));
    const bool a = prot && rest && *prot < *rest && *prot < 200 && *rest < 200;
    ok = ok && a;
    detail += fmt::format("(a,{}) protection {} < restoration {} < 200 ms: {}; ", bfd,
                          gap_text(prot), gap_text(rest), a ? "ok" : "NO");
  }
  // (b) TransparentCut without BFD.
  bool zero = true;
  for (const RunResult* r : s.of("static_protection/transparent_cut/no_bfd")) {
    const FlowStats& st = r->measured_flow()->stats;
    // Packets already past the cut may land within the first bin.
    const int64_t first_bin = r->failure_at->us() / st.bin_width().us() + 1;
    for (size_t i = static_cast<size_t>(first_bin); i < st.bins().size(); ++i) {
      zero = zero && st.bins()[i] == 0;
    }
    zero = zero && !r->measured_flow()->recovery_gap;
  }
  const Sweep& sw = s.sweep;
  const LldpSection& lldp = sw.cases.front().config.lldp;
  const double lo = lldp.detection_factor * lldp.update_interval_us / 1000.0;
  const double hi = lo + lldp.update_interval_us / 1000.0;
  const auto rest_cut = mean_gap_ms(s, "restoration/transparent_cut/no_bfd");
  const bool b = zero && rest_cut && *rest_cut >= lo && *rest_cut <= hi;
  ok = ok && b;
  detail += fmt::format(
      "(b) protection silent after cut: {}, restoration gap {} in [{:.0f}, {:.0f}] ms: {}; ",
      zero ? "yes" : "NO", gap_text(rest_cut), lo, hi, b ? "ok" : "NO");
  // (c) BFD 5 ms.
  std::string c_detail;
  bool c = true;
  for (const char* strategy : {"restoration", "static_protection"}) {
    for (const char* mode : {"port_down", "transparent_cut"}) {
      const auto g = mean_gap_ms(s, fmt::format("{}/{}/bfd5ms", strategy, mode));
      c = c && g && *g <= 25;
      c_detail += fmt::format(" {}/{}={}", strategy, mode, gap_text(g));
    }
  }
  ok = ok && c;
  detail += fmt::format("(c) BFD gaps <= 25 ms:{}: {}; runtime {:.1f} s", c_detail,
                        c ? "ok" : "NO", s.wall_s);
  return {ok, detail};
}

// 4. Loss non-decreasing in the BFD detection time, per seed.
Verdict bfd_sweep() {
  const SweepRun s = run_preset("fig12_bfd_sweep");
  bool ok = s.wall_s < 30;
  std::string detail;
  for (uint64_t seed : s.sweep.seeds) {
    std::vector<double> losses;
    for (const SweepCase& c : s.sweep.cases) {
      for (const RunResult* r : s.of(c.name)) {
        if (r->seed == seed) losses.push_back(loss_of(*r));
      }
    }
    const bool mono = std::is_sorted(losses.begin(), losses.end());
    ok = ok && mono;
    if (!mono || seed == s.sweep.seeds.front()) {
      detail += fmt::format("seed {} loss [{}] {}; ", seed, join(losses, "{:.5f}"),
                            mono ? "non-decreasing" : "NOT monotone");
    }
  }
  detail += fmt::format("runtime {:.1f} s", s.wall_s);
  return {ok, detail};
}

// 5. DPQoAP keeps throughput after the failure; static protection does not.
Verdict dpqoap_benefit() {
  const SweepRun s = run_preset("fig9_dpqoap_vs_static");
  const SimTime failure = SimTime::from_us(s.sweep.cases.front().config.failures.front().at_us);
  const SimTime horizon = SimTime::from_us(s.sweep.cases.front().config.run.duration_us);
  // Pre-failure window starts after the flow has settled.
  const SimTime pre_from = SimTime::from_s(5);
  std::map<std::string, std::vector<double>> pre, post;
  for (const RunResult& r : s.runs) {
    const FlowStats& st = r.measured_flow()->stats;
    pre[r.case_name].push_back(mean_throughput_bps(st, pre_from, failure));
    post[r.case_name].push_back(mean_throughput_bps(st, failure, horizon));
  }
  const double dq = mean(post["dpqoap"]) / mean(pre["dpqoap"]);
  const double st = mean(post["static_protection"]) / mean(pre["static_protection"]);
  bool every_seed = true;
  for (size_t i = 0; i < post["dpqoap"].size(); ++i) {
    every_seed = every_seed && post["dpqoap"][i] > post["static_protection"][i];
  }
  const bool ok = dq >= 0.9 && st <= 0.7 && every_seed && s.wall_s < 20;
  return {ok, fmt::format("post/pre dpqoap {:.3f} (>= 0.9), static {:.3f} (<= 0.7); "
                          "dpqoap > static in every seed: {} (post Mb/s dpqoap [{}] static [{}]); "
                          "runtime {:.1f} s",
                          dq, st, every_seed ? "yes" : "NO",
                          join(post["dpqoap"], "{:.2f}").c_str(),
                          join(post["static_protection"], "{:.2f}").c_str(), s.wall_s)};
}

// 6. Loss non-increasing as T_qoap shrinks.
Verdict tqoap_sweep() {
  const SweepRun s = run_preset("fig13_tqoap_sweep");
  std::vector<double> losses;
  for (const SweepCase& c : s.sweep.cases) {
    std::vector<double> per_seed;
    for (const RunResult* r : s.of(c.name)) per_seed.push_back(loss_of(*r));
    losses.push_back(mean(per_seed));
  }
  const bool mono = std::is_sorted(losses.rbegin(), losses.rend());
  return {mono && s.wall_s < 40,
          fmt::format("mean loss for T_qoap 10,7,4,2 s: [{}] {}; runtime {:.1f} s",
                      join(losses, "{:.5f}"), mono ? "non-increasing" : "NOT monotone",
                      s.wall_s)};
}

// Per-client QoE around a failure.
struct FailureQoe {
  double pre_quality = 0;      // mean segment quality, 60 s before the failure
  double worst_quality_dev = 0;  // max relative deviation of a segment after it
  double pre_buffer_s = 0;      // mean buffer level, 60 s before the failure
  double min_buffer_s = 0;      // lowest buffer level within 120 s after it
  double pre_playing = 0;       // mean on-screen quality before the failure
  double min_playing = 0;       // lowest on-screen quality after it
};

FailureQoe failure_qoe(const RunResult& r) {
  const ClientResult& c = r.clients.front();
  const SimTime f = *r.failure_at;
  const SimTime window = SimTime::from_s(60);
  FailureQoe q;
  std::vector<double> pre_q, pre_b, pre_p;
  for (const QoeSample& s : c.samples) {
    if (s.t >= f - window && s.t < f) pre_q.push_back(s.quality);
  }
  q.pre_quality = mean(pre_q);
  for (const QoeSample& s : c.samples) {
    if (s.t >= f && s.t < f + window) {
      q.worst_quality_dev =
          std::max(q.worst_quality_dev, std::abs(s.quality - q.pre_quality) / q.pre_quality);
    }
  }
  q.min_buffer_s = 1e9;
  q.min_playing = 1e9;
  for (const BufferSample& b : c.buffer) {
    if (b.t >= f - window && b.t < f) {
      pre_b.push_back(b.level.seconds());
      pre_p.push_back(b.playing_quality);
    } else if (b.t >= f && b.t < f + 2 * window) {
      q.min_buffer_s = std::min(q.min_buffer_s, b.level.seconds());
      q.min_playing = std::min(q.min_playing, b.playing_quality);
    }
  }
  q.pre_buffer_s = mean(pre_b);
  q.pre_playing = mean(pre_p);
  return q;
}

// 7. QoE under failure.
Verdict qoe_failure() {
  const SweepRun s = run_preset("fig14_qoe_failure");
  bool ok = s.wall_s < 120;
  std::string detail;
  // PortDown: every segment after the failure within 1% of the pre-failure mean.
  double worst = 0;
  for (const char* strategy : {"restoration", "static_protection"}) {
    for (const char* seg : {"seg1s", "seg10s"}) {
      for (const RunResult* r : s.of(fmt::format("{}/port_down/{}", strategy, seg))) {
        worst = std::max(worst, failure_qoe(*r).worst_quality_dev);
      }
    }
  }
  ok = ok && worst <= 0.01;
  detail += fmt::format("PortDown worst segment quality change {:.3f}% (<= 1%); ", worst * 100);
  // TransparentCut: buffer and on-screen quality dip in every case.
  std::map<std::string, double> depth;
  for (const char* strategy : {"restoration", "static_protection"}) {
    for (const char* seg : {"seg1s", "seg10s"}) {
      const std::string name = fmt::format("{}/transparent_cut/{}", strategy, seg);
      std::vector<double> depths;
      bool dipped = true;
      for (const RunResult* r : s.of(name)) {
        const FailureQoe q = failure_qoe(*r);
        depths.push_back(q.pre_buffer_s - q.min_buffer_s);
        dipped = dipped && q.min_buffer_s < q.pre_buffer_s && q.min_playing < q.pre_playing;
      }
      depth[name] = mean(depths);
      ok = ok && dipped;
      detail += fmt::format("{} buffer dip {:.2f} s, quality dip in every seed: {}; ", name,
                            depth[name], dipped ? "yes" : "NO");
    }
  }
  // Deeper for 10 s segments, under the strategy that recovers.
  const bool deeper = depth["restoration/transparent_cut/seg10s"] >
                      depth["restoration/transparent_cut/seg1s"];
  ok = ok && deeper;
  detail += fmt::format("restoration 10 s dip deeper than 1 s: {}; runtime {:.1f} s",
                        deeper ? "yes" : "NO", s.wall_s);
  return {ok, detail};
}

// 8. Congestion factorial at 98% load.
Verdict congestion_factorial() {
  const SweepRun s = run_preset("congestion_factorial", 2);
  bool ok = s.wall_s < 600;
  std::map<std::string, double> quality, switches;
  for (const SweepCase& c : s.sweep.cases) {
    std::vector<double> q, sw;
    for (const RunResult* r : s.of(c.name)) {
      q.push_back(r->qoe_report->avg_quality);
      sw.push_back(r->qoe_report->avg_switch_count);
    }
    quality[c.name] = mean(q);
    switches[c.name] = mean(sw);
  }
  auto key = [](const char* seg, const char* bfd) {
    return fmt::format("load49/{}/{}", seg, bfd);
  };
  std::string detail;
  const bool i = quality[key("seg10s", "no_bfd")] > quality[key("seg1s", "no_bfd")];
  detail += fmt::format("(i) no-BFD quality 10 s {:.4f} > 1 s {:.4f}: {}; ",
                        quality[key("seg10s", "no_bfd")], quality[key("seg1s", "no_bfd")],
                        i ? "ok" : "NO");
  bool ii = true, iii = true;
  for (const char* seg : {"seg1s", "seg10s"}) {
    const double q100 = quality[key(seg, "bfd100ms")];
    const double q1000 = quality[key(seg, "bfd1000ms")];
    const double q0 = quality[key(seg, "no_bfd")];
    const bool order = q100 >= q1000 && q1000 >= q0;
    ii = ii && order;
    detail += fmt::format("(ii) {} quality bfd100 {:.4f} >= bfd1000 {:.4f} >= none {:.4f}: {}; ",
                          seg, q100, q1000, q0, order ? "ok" : "NO");
    const double s100 = switches[key(seg, "bfd100ms")];
    const double s1000 = switches[key(seg, "bfd1000ms")];
    const double s0 = switches[key(seg, "no_bfd")];
    const bool lowest = s100 < s1000 && s100 < s0;
    iii = iii && lowest;
    detail += fmt::format("(iii) {} switches bfd100 {:.2f} < bfd1000 {:.2f}, none {:.2f}: {}; ",
                          seg, s100, s1000, s0, lowest ? "ok" : "NO");
  }
  size_t reroutes = 0;
  bool iv = true;
  for (const RunResult& r : s.runs) {
    for (const RerouteRecord& rr : r.reroutes) {
      ++reroutes;
      iv = iv && rr.moved.size() == (rr.candidates + 1) / 2;
    }
  }
  iv = iv && reroutes > 0;
  detail += fmt::format("(iv) {} reroutes, each moved ceil(0.5 n) flows: {}; runtime {:.1f} s",
                        reroutes, iv ? "ok" : "NO", s.wall_s);
  ok = ok && i && ii && iii && iv;
  return {ok, detail};
}

// Exhaustive simple-path enumeration between two switches.
void dfs_paths(const Topology& topo, NodeId at, NodeId goal, std::vector<NodeId>& trail,
               std::set<std::vector<NodeId>>& out) {
  if (at == goal) {
    out.insert(trail);
    return;
  }
  for (const LinkId l : topo.node(at).links) {
    const LinkInfo& link = topo.link(l);
    const NodeId next = link.peer_of(at).node;
    if (!topo.is_switch(next)) continue;
    if (std::find(trail.begin(), trail.end(), next) != trail.end()) continue;
    trail.push_back(next);
    dfs_paths(topo, next, goal, trail, out);
    trail.pop_back();
  }
}

// 9. Path enumeration against an independent oracle on random graphs.
Verdict path_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  size_t graphs = 0, paths = 0;
  std::string failure;
  for (int g = 0; g < 200 && failure.empty(); ++g) {
    const int n = std::uniform_int_distribution<int>(2, 8)(rng);
    Topology topo;
    std::vector<NodeId> sw;
    for (int i = 0; i < n; ++i) sw.push_back(topo.add_switch(fmt::format("S{}", i + 1)));
    std::set<std::pair<int, int>> edges;
    // Random spanning tree keeps the graph connected; extra edges add cycles.
    for (int i = 1; i < n; ++i) {
      edges.insert({std::uniform_int_distribution<int>(0, i - 1)(rng), i});
    }
    const int extra = std::uniform_int_distribution<int>(0, n * (n - 1) / 2)(rng);
    for (int e = 0; e < extra; ++e) {
      int a = std::uniform_int_distribution<int>(0, n - 1)(rng);
      int b = std::uniform_int_distribution<int>(0, n - 1)(rng);
      if (a == b) continue;
      edges.insert({std::min(a, b), std::max(a, b)});
    }
    for (const auto& [a, b] : edges) {
      LinkParams p;
      // Coarse delays produce latency ties that exercise the tie-breakers.
      p.prop_delay = SimTime::from_ms(std::uniform_int_distribution<int>(1, 3)(rng));
      topo.add_link(sw[a], sw[b], p);
    }
    const int src = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const int dst = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const NodeId hs = topo.add_host("hs");
    const NodeId hd = topo.add_host("hd");
    topo.add_link(hs, sw[src], LinkParams{});
    topo.add_link(hd, sw[dst], LinkParams{});
    NetworkView view(topo);
    const std::vector<Path> got = compute_all_paths(view, hs, hd, std::nullopt);

    std::set<std::vector<NodeId>> expected;
    std::vector<NodeId> trail{sw[src]};
    dfs_paths(topo, sw[src], sw[dst], trail, expected);
    std::set<std::vector<NodeId>> actual;
    for (const Path& p : got) actual.insert(p.switches());
    if (actual != expected || actual.size() != got.size()) {
      failure = fmt::format("graph {}: {} paths, oracle {}", g, got.size(), expected.size());
      break;
    }
    // Ordering: hop count, then latency, then switch ids lexicographically.
    auto latency = [&](const Path& p) {
      int64_t total = 0;
      const std::vector<NodeId> s = p.switches();
      for (size_t i = 0; i + 1 < s.size(); ++i) {
        total += topo.link(*topo.link_between(s[i], s[i + 1])).params.prop_delay.us();
      }
      return total;
    };
    auto key = [&](const Path& p) {
      std::vector<uint32_t> ids;
      for (NodeId id : p.switches()) ids.push_back(id.value);
      return std::make_tuple(p.switches().size(), latency(p), ids);
    };
    for (size_t i = 0; i + 1 < got.size(); ++i) {
      if (!(key(got[i]) < key(got[i + 1]))) {
        failure = fmt::format("graph {}: paths {} and {} out of order", g, i, i + 1);
        break;
      }
    }
    ++graphs;
    paths += got.size();
  }
  const double wall = seconds_since(start);
  if (!failure.empty()) return {false, failure};
  return {wall < 30, fmt::format("{} graphs, {} paths match the DFS oracle in set and order; "
                                 "runtime {:.2f} s",
                                 graphs, paths, wall)};
}

// 10. Byte-identical CSVs for repeated runs.
Verdict determinism() {
  const auto start = Clock::now();
  size_t files = 0;
  std::string mismatch;
  for (const std::string& id : preset_ids()) {
    Sweep sweep = make_preset(id);
    sweep.seeds = {sweep.seeds.front()};
    if (id == "congestion_factorial") {
      sweep.cases = {sweep.cases.back()};  // one BFD case keeps the runtime bounded
    }
    for (size_t c = 0; c < sweep.cases.size() && mismatch.empty(); ++c) {
      const ScenarioConfig config = sweep.run_config(c, sweep.seeds.front());
      const RunResult a = run_scenario(config, sweep.cases[c].name);
      const RunResult b = run_scenario(config, sweep.cases[c].name);
      files += 2;
      if (series_csv(a) != series_csv(b) || qoe_csv(a) != qoe_csv(b) ||
          a.events != b.events) {
        mismatch = fmt::format("{} / {}", id, sweep.cases[c].name);
      }
    }
  }
  if (!mismatch.empty()) return {false, "CSV mismatch in " + mismatch};
  return {true, fmt::format("{} CSV pairs byte-identical across all presets; runtime {:.1f} s",
                            files, seconds_since(start))};
}

// 11. Conservation invariants on every run of the suite.
Verdict conservation() {
  if (g_violations.empty()) {
    return {g_runs_checked > 0, fmt::format("{} runs, no violations", g_runs_checked)};
  }
  std::string detail = fmt::format("{} violations in {} runs:", g_violations.size(),
                                   g_runs_checked);
  for (size_t i = 0; i < std::min<size_t>(5, g_violations.size()); ++i) {
    detail += " " + g_violations[i] + ";";
  }
  return {false, detail};
}

}  // namespace
}  // namespace sdnft

int main(int argc, char** argv) {
  using namespace sdnft;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"detection time formula", detection_time},
      {"quality model", quality_model},
      {"failure-mode separation", failure_modes},
      {"BFD detection-time sweep", bfd_sweep},
      {"DPQoAP benefit", dpqoap_benefit},
      {"T_qoap sweep", tqoap_sweep},
      {"QoE under failure", qoe_failure},
      {"congestion factorial", congestion_factorial},
      {"path enumeration oracle", path_oracle},
      {"determinism", determinism},
      {"conservation invariants", conservation},
  };
  // Optional argument: comma-free list of criterion numbers to run.
  std::set<size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(static_cast<size_t>(std::stoul(argv[i])));
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    fmt::print("{} [{}] {}: {}\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
