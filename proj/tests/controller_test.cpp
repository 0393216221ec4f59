#include "sdnft/controller.hpp"

#include <gtest/gtest.h>

#include "sdnft/errors.hpp"
#include "test_support.hpp"

namespace sdnft {
namespace {

LinkParams switch_link() {
  LinkParams p;
  p.capacity_bps = 50'000'000;
  p.prop_delay = SimTime::from_ms(1);
  return p;
}

// Canonical topology with `n` hosts on S1 (a0..) and `n` on S6 (b0..).
class ControllerTest : public ::testing::Test {
 protected:
  void build(Strategy strategy, int hosts = 1) {
    ctl_.reset();
    channel_.reset();
    net_.reset();
    sim_ = std::make_unique<Simulator>(1);
    topo_ = Topology::canonical(switch_link());
    LinkParams access;
    access.prop_delay = SimTime::from_us(100);
    for (int i = 0; i < hosts; ++i) {
      a_.push_back(topo_.add_host("a" + std::to_string(i)));
      b_.push_back(topo_.add_host("b" + std::to_string(i)));
      topo_.add_link(a_.back(), s("S1"), access);
      topo_.add_link(b_.back(), s("S6"), access);
    }
    net_ = std::make_unique<Network>(*sim_, topo_);
    channel_ = std::make_unique<ControlChannel>(*sim_, SimTime::from_ms(2));
    ControllerConfig cfg;
    cfg.strategy = strategy;
    ctl_ = std::make_unique<Controller>(*sim_, *net_, *channel_, cfg);
  }
  NodeId s(const char* name) const { return *topo_.find_node(name); }
  LinkId l(const char* name) const { return *topo_.find_link(name); }
  PortId port_towards(const char* from, const char* to) const {
    return topo_.link(l((std::string(from) + "-" + to).c_str())).end_at(s(from)).port;
  }
  FlowKey key(int i) const { return FlowKey{a_[i], b_[i], tags::kCbr}; }

  std::unique_ptr<Simulator> sim_;
  Topology topo_;
  std::vector<NodeId> a_, b_;
  std::unique_ptr<Network> net_;
  std::unique_ptr<ControlChannel> channel_;
  std::unique_ptr<Controller> ctl_;
};

TEST_F(ControllerTest, RestorationInstallsShortestPathThenReroutesAfterDelays) {
  build(Strategy::kRestoration);
  ctl_->add_flow(key(0));
  ctl_->start();
  EXPECT_EQ(net_->switch_at(s("S2")).forward(key(0)).port, port_towards("S2", "S5"));
  sim_->run_until(SimTime::from_s(1));
  net_->inject_failure(l("S2-S5"), FailureMode::kPortDown);
  EXPECT_EQ(ctl_->restoration_on_failure(l("S2-S5")), 0u);
  // Compute time (5 ms) plus one control-channel hop (2 ms).
  sim_->run_until(SimTime::from_s(1) + SimTime::from_ms(7) - SimTime::from_us(1));
  EXPECT_EQ(net_->switch_at(s("S2")).forward(key(0)).port, port_towards("S2", "S5"));
  sim_->run_until(SimTime::from_s(1) + SimTime::from_ms(7));
  EXPECT_EQ(net_->switch_at(s("S2")).forward(key(0)).port, port_towards("S2", "S3"));
  EXPECT_EQ(net_->switch_at(s("S3")).forward(key(0)).port, port_towards("S3", "S5"));
  EXPECT_EQ(ctl_->current_path(key(0))->switches().size(), 5u);
  EXPECT_EQ(ctl_->stats().restorations, 1u);
}

TEST_F(ControllerTest, ProtectionBuildsFastFailoverBucketsInPathOrder) {
  build(Strategy::kStaticProtection);
  ctl_->add_flow(key(0));
  ctl_->start();
  const GroupId g = *ctl_->group_of(a_[0], b_[0]);
  EXPECT_EQ(ctl_->group_paths(g).size(), 3u);
  const auto* s2 = ctl_->bucket_list(s("S2"), g);
  ASSERT_NE(s2, nullptr);
  ASSERT_EQ(s2->size(), 2u);
  EXPECT_EQ((*s2)[0].out_port, port_towards("S2", "S5"));
  EXPECT_EQ((*s2)[1].out_port, port_towards("S2", "S3"));
  const auto* s3 = ctl_->bucket_list(s("S3"), g);
  ASSERT_NE(s3, nullptr);
  EXPECT_EQ((*s3)[0].out_port, port_towards("S3", "S5"));
  EXPECT_EQ((*s3)[1].out_port, port_towards("S3", "S4"));
  // The data plane fails over locally with no controller involvement.
  net_->inject_failure(l("S2-S5"), FailureMode::kPortDown);
  EXPECT_EQ(net_->switch_at(s("S2")).forward(key(0)).port, port_towards("S2", "S3"));
}

TEST_F(ControllerTest, MeasuredLatencyIncludesQueueingDelay) {
  build(Strategy::kDpqoap);
  const LinkId link = l("S2-S5");
  const int dir = topo_.link(link).direction_from(s("S2"));
  EXPECT_EQ(ctl_->measure_link_latency(link, dir), SimTime::from_ms(1));
  Packet p;
  p.size_bytes = 1500;
  for (int i = 0; i < 50; ++i) net_->send_from_switch(s("S2"), port_towards("S2", "S5"), p);
  // 50 packets x 240 us of serialization at 50 Mb/s.
  EXPECT_EQ(ctl_->measure_link_latency(link, dir), SimTime::from_ms(13));
  EXPECT_EQ(ctl_->measure_link_latency(link, 1 - dir), SimTime::from_ms(1));
}

TEST_F(ControllerTest, DpqoapMovesPrimaryOffTheCongestedLink) {
  build(Strategy::kDpqoap);
  ctl_->add_flow(key(0));
  ctl_->start();
  const GroupId g = *ctl_->group_of(a_[0], b_[0]);
  Packet p;
  p.size_bytes = 1500;
  for (int i = 0; i < 50; ++i) net_->send_from_switch(s("S2"), port_towards("S2", "S5"), p);
  ctl_->dpqoap_evaluate();
  const Path primary = *ctl_->current_path(key(0));
  EXPECT_EQ(primary.switches(),
            (std::vector<NodeId>{s("S1"), s("S2"), s("S3"), s("S5"), s("S6")}));
  EXPECT_EQ((*ctl_->bucket_list(s("S2"), g))[0].out_port, port_towards("S2", "S3"));
  EXPECT_GE(ctl_->stats().bucket_reorders, 1u);
  // The switch sees the new order after compute time plus the channel delay.
  EXPECT_EQ(net_->switch_at(s("S2")).forward(key(0)).port, port_towards("S2", "S5"));
  sim_->run_until(SimTime::from_ms(7));
  EXPECT_EQ(net_->switch_at(s("S2")).forward(key(0)).port, port_towards("S2", "S3"));
  // A second evaluation with an unchanged picture pushes nothing.
  const uint64_t before = ctl_->stats().group_mods;
  EXPECT_EQ(ctl_->organize_bucket_list(g, primary), 0u);
  EXPECT_EQ(ctl_->stats().group_mods, before);
}

// Property: the congestion handler moves ceil(n/2) of the n flows crossing the
// congested direction, only such flows, and each onto a path avoiding it.
TEST_F(ControllerTest, CongestionHandlerMovesHalfOfTheCrossingFlows) {
  for (int n = 1; n <= 5; ++n) {
    a_.clear();
    b_.clear();
    build(Strategy::kRestoration, n + 1);
    for (int i = 0; i < n; ++i) ctl_->add_flow(key(i));
    // A reverse flow crosses the link in the other direction only.
    const FlowKey reverse{b_[n], a_[n], tags::kCbr};
    ctl_->add_flow(reverse);
    ctl_->start();
    const LinkId link = l("S2-S5");
    const int dir = topo_.link(link).direction_from(s("S2"));
    const auto moved = ctl_->congestion_handler(link, dir);
    EXPECT_EQ(moved.size(), static_cast<size_t>((n + 1) / 2)) << n;
    for (const FlowKey& k : moved) {
      EXPECT_NE(k, reverse);
      EXPECT_FALSE(ctl_->view().traverses(*ctl_->current_path(k), link));
    }
    EXPECT_TRUE(ctl_->view().traverses(*ctl_->current_path(reverse), link));
    ASSERT_EQ(ctl_->reroutes().size(), 1u);
    EXPECT_EQ(ctl_->reroutes()[0].candidates, static_cast<size_t>(n));
    // Within the cooldown a second report is suppressed.
    EXPECT_TRUE(ctl_->congestion_handler(link, dir).empty());
  }
}

TEST_F(ControllerTest, RejectsInvalidConfiguration) {
  build(Strategy::kRestoration);
  ControllerConfig bad;
  bad.k_max = 0;
  EXPECT_THROW(Controller(*sim_, *net_, *channel_, bad), ConfigError);
  bad = {};
  bad.congestion.reroute_fraction = 0;
  EXPECT_THROW(Controller(*sim_, *net_, *channel_, bad), ConfigError);
  EXPECT_THROW(parse_strategy("fastest"), ConfigError);
  EXPECT_THROW(ctl_->add_flow(FlowKey{s("S1"), b_[0], 0}), ConfigError);
}

}  // namespace
}  // namespace sdnft
