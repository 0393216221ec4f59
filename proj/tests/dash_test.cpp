#include "sdnft/dash.hpp"

#include <gtest/gtest.h>

#include "sdnft/errors.hpp"
#include "test_support.hpp"

namespace sdnft {
namespace {

TEST(DashTest, MpdCountsWholeSegments) {
  const Mpd m = make_mpd(Resolution::k720p, SimTime::from_s(4), SimTime::from_s(30));
  EXPECT_EQ(m.segment_count, 7u);
  EXPECT_EQ(m.ladder_kbps, bitrate_ladder(Resolution::k720p));
  EXPECT_THROW(make_mpd(Resolution::k720p, SimTime::zero(), SimTime::from_s(30)), ConfigError);
  EXPECT_THROW(make_mpd(Resolution::k720p, SimTime::from_s(10), SimTime::from_s(5)),
               ConfigError);
}

TEST(DashTest, TransportHelpers) {
  const TransportConfig t;
  EXPECT_EQ(chunk_count(1, t), 1u);
  EXPECT_EQ(chunk_count(1500, t), 1u);
  EXPECT_EQ(chunk_count(1501, t), 2u);
  EXPECT_EQ(chunk_rto(std::nullopt, t), t.initial_rto);
  EXPECT_EQ(chunk_rto(2500.0, t), SimTime::from_us(5000));
}

// Clients on S1, server on S2; a single 20 Mb/s bottleneck between them.
struct Testbed {
  Topology topo;
  NodeId server;
  std::vector<NodeId> clients;
};

Testbed make_testbed(int clients) {
  Testbed tb;
  const NodeId s1 = tb.topo.add_switch("S1");
  const NodeId s2 = tb.topo.add_switch("S2");
  LinkParams bottleneck;
  bottleneck.capacity_bps = 20'000'000;
  bottleneck.prop_delay = SimTime::from_ms(1);
  tb.topo.add_link(s1, s2, bottleneck);
  LinkParams access;
  access.prop_delay = SimTime::from_us(100);
  tb.server = tb.topo.add_host("vs");
  tb.topo.add_link(tb.server, s2, access);
  for (int i = 0; i < clients; ++i) {
    tb.clients.push_back(tb.topo.add_host("c" + std::to_string(i)));
    tb.topo.add_link(tb.clients.back(), s1, access);
  }
  return tb;
}

std::unique_ptr<DashSystem> run_dash(Simulator& sim, Network& net, const Testbed& tb,
                                     SimTime seg, SimTime video, SimTime until) {
  for (NodeId c : tb.clients) {
    testing::install_route(net, FlowKey{c, tb.server, tags::kDash});
    testing::install_route(net, FlowKey{tb.server, c, tags::kDash});
  }
  auto dash = std::make_unique<DashSystem>(sim, net, tb.server,
                                           make_mpd(Resolution::k1080p, seg, video),
                                           AbrConfig{}, TransportConfig{});
  for (size_t i = 0; i < tb.clients.size(); ++i) {
    dash->add_client(DashClientConfig{"c" + std::to_string(i), tb.clients[i],
                                      SimTime::from_ms(10 * static_cast<int64_t>(i))});
  }
  dash->start();
  sim.run_until(until);
  return dash;
}

TEST(DashTest, SingleClientDownloadsTheWholeVideo) {
  Testbed tb = make_testbed(1);
  Simulator sim(1);
  Network net(sim, tb.topo);
  auto dash = run_dash(sim, net, tb, SimTime::from_s(2), SimTime::from_s(60),
                       SimTime::from_s(120));
  const DashClient& c = dash->client(0);
  EXPECT_EQ(c.samples().size(), 30u);
  EXPECT_TRUE(c.finished());
  EXPECT_EQ(dash->retransmissions(), 0u);
  for (const QoeSample& s : c.samples()) {
    // Nothing downloads faster than the bottleneck allows.
    const double bits = s.bitrate_kbps * 1000.0 * 2.0;
    EXPECT_GE(s.latency.seconds(), bits / 20e6);
    EXPECT_NEAR(s.quality, video_quality(s.bitrate_kbps, Resolution::k1080p), 1e-12);
  }
  // The estimate climbs above the lowest tier once the first segment is in.
  EXPECT_GT(c.qoe().avg_bitrate_kbps, 1000.0);
}

// Property: the buffer never exceeds the cap plus one segment, a stalled or
// not yet started client shows zero playing quality, and stalls only happen
// with less than one segment buffered.
TEST(DashTest, BufferInvariantsHoldForSharedBottleneck) {
  for (int64_t seg_s : {1, 4, 10}) {
    Testbed tb = make_testbed(3);
    Simulator sim(7);
    Network net(sim, tb.topo);
    const SimTime seg = SimTime::from_s(seg_s);
    auto dash = run_dash(sim, net, tb, seg, SimTime::from_s(120), SimTime::from_s(150));
    const AbrConfig abr;
    for (size_t i = 0; i < dash->client_count(); ++i) {
      const DashClient& c = dash->client(i);
      ASSERT_FALSE(c.buffer_samples().empty());
      for (const BufferSample& b : c.buffer_samples()) {
        EXPECT_LE(b.level, abr.max_buffer + seg) << "seg " << seg_s;
        EXPECT_GE(b.level, SimTime::zero());
        EXPECT_GE(b.playing_quality, 0.0);
        EXPECT_LE(b.playing_quality, 1.0);
      }
      for (const auto& [from, to] : c.stalls()) EXPECT_LE(from, to);
      EXPECT_EQ(c.samples().size(), 120u / static_cast<size_t>(seg_s));
    }
  }
}

TEST(DashTest, ClientsSharingABottleneckGetSimilarBitrates) {
  Testbed tb = make_testbed(3);
  Simulator sim(3);
  Network net(sim, tb.topo);
  auto dash = run_dash(sim, net, tb, SimTime::from_s(2), SimTime::from_s(120),
                       SimTime::from_s(200));
  const QoeReport r = dash->report();
  ASSERT_EQ(r.clients.size(), 3u);
  double lo = 1e18, hi = 0;
  for (const ClientQoe& q : r.clients) {
    lo = std::min(lo, q.avg_bitrate_kbps);
    hi = std::max(hi, q.avg_bitrate_kbps);
  }
  EXPECT_LE(hi - lo, 0.25 * hi);
  EXPECT_NEAR(r.avg_bitrate_kbps,
              (r.clients[0].avg_bitrate_kbps + r.clients[1].avg_bitrate_kbps +
               r.clients[2].avg_bitrate_kbps) / 3.0,
              1e-9);
}

TEST(DashTest, RejectsInvalidSetups) {
  Testbed tb = make_testbed(2);
  Simulator sim(1);
  Network net(sim, tb.topo);
  const Mpd mpd = make_mpd(Resolution::k1080p, SimTime::from_s(1), SimTime::from_s(10));
  EXPECT_THROW(DashSystem(sim, net, *tb.topo.find_node("S1"), mpd, AbrConfig{},
                          TransportConfig{}),
               ConfigError);
  DashSystem dash(sim, net, tb.server, mpd, AbrConfig{}, TransportConfig{});
  EXPECT_THROW(dash.add_client({"x", tb.server, SimTime::zero()}), ConfigError);
  dash.add_client({"a", tb.clients[0], SimTime::zero()});
  EXPECT_THROW(dash.add_client({"b", tb.clients[0], SimTime::zero()}), ConfigError);
}

}  // namespace
}  // namespace sdnft
