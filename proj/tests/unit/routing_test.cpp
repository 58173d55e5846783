#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "rapido/beacon.hpp"
#include "rapido/error.hpp"
#include "rapido/routing.hpp"

namespace rapido {
namespace {

ChannelGraph build(std::initializer_list<std::tuple<const char*, const char*, Sat, Sat>> channels) {
  GraphBuilder b;
  std::set<std::string> names;
  for (const auto& [x, y, bx, by] : channels) {
    names.insert(x);
    names.insert(y);
  }
  for (const auto& n : names) b.add_node(n);
  for (const auto& [x, y, bx, by] : channels) b.add_channel(x, y, bx + by, bx, by);
  return std::move(b).build();
}

BeaconEpoch epoch_of(const ChannelGraph& g, std::initializer_list<const char*> names) {
  BeaconEpoch e;
  for (const char* n : names) e.beacons.push_back(g.node(n));
  return e;
}

TEST(Beacon, PortionsPartitionEvenly) {
  const ChannelGraph g = generate_synthetic_graph(2681, 7347, 1);
  const auto portions = partition_topology(g, 200, 7);
  ASSERT_EQ(portions.size(), 200u);
  std::set<std::uint32_t> seen;
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto& p : portions) {
    lo = std::min(lo, p.size());
    hi = std::max(hi, p.size());
    for (const NodeId n : p) EXPECT_TRUE(seen.insert(n.value).second);
  }
  EXPECT_EQ(seen.size(), g.node_count());
  EXPECT_EQ(lo, 13u);
  EXPECT_EQ(hi, 14u);
}

TEST(Beacon, MorePortionsThanNodes) {
  const ChannelGraph g = generate_synthetic_graph(5, 4, 1);
  const auto portions = partition_topology(g, 50, 1);
  EXPECT_EQ(portions.size(), 5u);
  const BeaconEpoch e = elect_beacons(portions, 0, 1);
  EXPECT_EQ(std::set<NodeId>(e.beacons.begin(), e.beacons.end()).size(), 5u);
}

TEST(Beacon, ElectionIsDeterministicAndRotates) {
  const ChannelGraph g = generate_synthetic_graph(500, 1200, 3);
  const auto portions = partition_topology(g, 20, 11);
  const BeaconEpoch a = elect_beacons(portions, 4, 11);
  const BeaconEpoch b = elect_beacons(portions, 4, 11);
  EXPECT_EQ(a.beacons, b.beacons);
  ASSERT_EQ(a.beacons.size(), portions.size());
  for (std::size_t k = 0; k < portions.size(); ++k) {
    EXPECT_NE(std::find(portions[k].begin(), portions[k].end(), a.beacons[k]), portions[k].end());
    EXPECT_TRUE(a.is_beacon(a.beacons[k]));
  }
  std::size_t changed = 0;
  for (std::uint64_t epoch = 5; epoch < 10; ++epoch) {
    if (elect_beacons(portions, epoch, 11).beacons != a.beacons) ++changed;
  }
  EXPECT_GT(changed, 0u);
}

TEST(Routing, LineGraphRouteToBeacon) {
  const ChannelGraph g = build({{"A", "B", 5, 5}, {"B", "C", 5, 5}});
  const RoutingTables t = proactive_update(g, epoch_of(g, {"C"}));
  const auto path = t.path_to_beacon(g.node("A"), 0);
  ASSERT_TRUE(path);
  EXPECT_EQ(*path, (std::vector<NodeId>{g.node("A"), g.node("B"), g.node("C")}));
  const RoutingTable table = t.table(g, g.node("A"));
  EXPECT_EQ(table.entries.at(g.node("C")).length(), 2u);
  EXPECT_EQ(t.table(g, g.node("B")).entries.at(g.node("C")).length(), 1u);
}

TEST(Routing, DisconnectedNodeHasEmptyTable) {
  GraphBuilder b;
  for (const char* n : {"A", "B", "Z"}) b.add_node(n);
  b.add_channel("A", "B", 10, 5, 5);
  const ChannelGraph g = std::move(b).build();
  const RoutingTables t = proactive_update(g, epoch_of(g, {"A"}));
  EXPECT_TRUE(t.table(g, g.node("Z")).entries.empty());
  try {
    candidate_paths(g, t, g.node("Z"), g.node("B"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoCandidatePath);
  }
}

TEST(Routing, TiesBreakTowardSmallestNextHop) {
  // A reaches D through B or C at equal distance.
  const ChannelGraph g = build({{"A", "C", 5, 5}, {"A", "B", 5, 5}, {"B", "D", 5, 5}, {"C", "D", 5, 5}});
  const RoutingTables t = proactive_update(g, epoch_of(g, {"D"}));
  EXPECT_EQ((*t.path_to_beacon(g.node("A"), 0))[1], g.node("B"));
}

TEST(Routing, CandidateThroughSharedNeighbourBeacon) {
  const ChannelGraph g = build({{"c", "x", 5, 5}, {"m", "x", 5, 5}});
  const RoutingTables t = proactive_update(g, epoch_of(g, {"x"}));
  const auto paths = candidate_paths(g, t, g.node("c"), g.node("m"));
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].hops, (std::vector<NodeId>{g.node("c"), g.node("x"), g.node("m")}));
}

TEST(Routing, DeloopingSplicesToDirectChannel) {
  const ChannelGraph g = build({{"c", "m", 5, 5}, {"m", "b", 5, 5}});
  const RoutingTables t = proactive_update(g, epoch_of(g, {"b"}));
  const auto paths = candidate_paths(g, t, g.node("c"), g.node("m"));
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].length(), 1u);
}

TEST(Routing, RemoveLoopsSplicesCycles) {
  const std::vector<NodeId> walk{NodeId{0}, NodeId{1}, NodeId{2}, NodeId{1}, NodeId{3}};
  EXPECT_EQ(remove_loops(walk), (std::vector<NodeId>{NodeId{0}, NodeId{1}, NodeId{3}}));
}

TEST(Routing, ProbeReportsBothSides) {
  const ChannelGraph g = build({{"Alice", "Dani", 2, 3}});
  const Route r = make_route(g, {g.node("Alice"), g.node("Dani")});
  const PathProbe p = reactive_probe(g, r);
  ASSERT_EQ(p.sendable.size(), 1u);
  EXPECT_EQ(p.sendable[0], 2);
  EXPECT_EQ(p.receivable[0], 3);

  Route empty;
  empty.hops = {g.node("Alice")};
  EXPECT_TRUE(reactive_probe(g, empty).sendable.empty());
}

TEST(Routing, ProbeOfClosedChannelIsStale) {
  ChannelGraph g = build({{"a", "b", 2, 3}});
  const Route r = make_route(g, {g.node("a"), g.node("b")});
  Ledger ledger(g.node_count());
  ledger.close_channel(g, r.channels[0]);
  try {
    reactive_probe(g, r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StaleRoute);
  }
}

TEST(Routing, LnDirectChannel) {
  const ChannelGraph g = build({{"a", "b", 10, 0}, {"a", "c", 10, 0}, {"c", "b", 10, 0}});
  EXPECT_EQ(ln_route(g, g.node("a"), g.node("b"), 7).length(), 1u);
}

TEST(Routing, LnPicksCheaperOfTwoPaths) {
  GraphBuilder b;
  b.add_node("a");
  b.add_node("b");
  b.add_node("x", FeePolicy{5, 0});
  b.add_node("y", FeePolicy{1, 0});
  b.add_channel("a", "x", 100, 100, 0);
  b.add_channel("x", "b", 100, 100, 0);
  b.add_channel("a", "y", 100, 100, 0);
  b.add_channel("y", "b", 100, 100, 0);
  const ChannelGraph g = std::move(b).build();
  const Route r = ln_route(g, g.node("a"), g.node("b"), 10);
  EXPECT_EQ(r.hops[1], g.node("y"));
}

TEST(Routing, LnRespectsCompoundedAmounts) {
  // The first hop must carry the amount plus y's fee: 10 + 3 = 13 > 12.
  GraphBuilder b;
  b.add_node("a");
  b.add_node("b");
  b.add_node("y", FeePolicy{3, 0});
  b.add_channel("a", "y", 12, 12, 0);
  b.add_channel("y", "b", 100, 100, 0);
  const ChannelGraph g = std::move(b).build();
  try {
    ln_route(g, g.node("a"), g.node("b"), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoRoute);
  }
  EXPECT_EQ(ln_route(g, g.node("a"), g.node("b"), 9).length(), 2u);
}

}  // namespace
}  // namespace rapido
