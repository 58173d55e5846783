#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "rapido/beacon.hpp"
#include "rapido/error.hpp"
#include "rapido/routing.hpp"
#include "rapido/vdp.hpp"

namespace rapido {
namespace {

bool is_simple(const Route& r) { return std::set<NodeId>(r.hops.begin(), r.hops.end()).size() == r.hops.size(); }

Sat route_fee(const ChannelGraph& g, const Route& r, Sat amount) {
  Sat carried = amount;
  for (std::size_t h = r.hops.size() - 1; h-- > 1;) carried += g.fee_policy(r.hops[h]).fee(carried);
  return carried - amount;
}

TEST(RoutingProperty, BeaconTreesAreShortestPaths) {
  Rng rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    testing::GraphShape shape;
    shape.nodes = 4 + rng.below(12);
    shape.extra_channels = rng.below(15);
    const ChannelGraph g = testing::random_graph(rng, shape);
    const auto portions = partition_topology(g, 1 + rng.below(4), trial);
    const BeaconEpoch epoch = elect_beacons(portions, 0, trial);
    const RoutingTables t = proactive_update(g, epoch);
    for (std::size_t k = 0; k < epoch.beacons.size(); ++k) {
      const auto dist = testing::bfs_distances(g, epoch.beacons[k]);
      for (std::uint32_t n = 0; n < g.node_count(); ++n) {
        const auto d = t.distance(NodeId{n}, k);
        ASSERT_TRUE(d.has_value());
        EXPECT_EQ(static_cast<int>(*d), dist[n]);
        const auto path = t.path_to_beacon(NodeId{n}, k);
        ASSERT_TRUE(path);
        EXPECT_EQ(path->size(), *d + 1u);
        EXPECT_NO_THROW(make_route(g, *path));
      }
    }
  }
}

TEST(RoutingProperty, HopDistanceMatchesBfs) {
  Rng rng(606);
  for (int trial = 0; trial < 60; ++trial) {
    testing::GraphShape shape;
    shape.nodes = 2 + rng.below(14);
    shape.extra_channels = rng.below(15);
    const ChannelGraph g = testing::random_graph(rng, shape);
    const NodeId src{static_cast<std::uint32_t>(rng.below(shape.nodes))};
    const auto dist = testing::bfs_distances(g, src);
    for (std::uint32_t n = 0; n < g.node_count(); ++n) {
      const auto d = hop_distance(g, src, NodeId{n});
      ASSERT_TRUE(d.has_value());
      EXPECT_EQ(static_cast<int>(*d), dist[n]);
    }
  }
}

TEST(RoutingProperty, CandidatesAreTheDistinctBeaconRoutes) {
  Rng rng(707);
  for (int trial = 0; trial < 60; ++trial) {
    testing::GraphShape shape;
    shape.nodes = 4 + rng.below(12);
    shape.extra_channels = rng.below(15);
    const ChannelGraph g = testing::random_graph(rng, shape);
    const auto portions = partition_topology(g, 1 + rng.below(6), trial);
    const RoutingTables t = proactive_update(g, elect_beacons(portions, 0, trial));
    const NodeId c{static_cast<std::uint32_t>(rng.below(shape.nodes))};
    const NodeId m{static_cast<std::uint32_t>((c.value + 1 + rng.below(shape.nodes - 1)) % shape.nodes)};
    const auto routes = beacon_routes(t, c, m);
    EXPECT_EQ(routes.size(), t.beacons().size());
    std::set<std::vector<NodeId>> distinct;
    for (const auto& [k, nodes] : routes) {
      EXPECT_EQ(nodes.front(), c);
      EXPECT_EQ(nodes.back(), m);
      EXPECT_LE(nodes.size(), *t.distance(c, k) + *t.distance(m, k) + 1);
      distinct.insert(nodes);
    }
    std::set<std::vector<NodeId>> candidates;
    for (const Route& r : candidate_paths(g, t, c, m, 0)) candidates.insert(r.hops);
    EXPECT_EQ(candidates, distinct);
  }
}

TEST(RoutingProperty, CandidatesAreSimpleAndConnectEndpoints) {
  Rng rng(505);
  for (int trial = 0; trial < 60; ++trial) {
    testing::GraphShape shape;
    shape.nodes = 4 + rng.below(12);
    shape.extra_channels = rng.below(15);
    const ChannelGraph g = testing::random_graph(rng, shape);
    const auto portions = partition_topology(g, 1 + rng.below(5), trial);
    const RoutingTables t = proactive_update(g, elect_beacons(portions, 0, trial));
    const NodeId c{static_cast<std::uint32_t>(rng.below(shape.nodes))};
    const NodeId m{static_cast<std::uint32_t>((c.value + 1 + rng.below(shape.nodes - 1)) % shape.nodes)};
    const auto paths = candidate_paths(g, t, c, m, 0);
    ASSERT_FALSE(paths.empty());
    std::set<std::vector<NodeId>> seen;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const Route& r = paths[i];
      EXPECT_TRUE(is_simple(r));
      EXPECT_EQ(r.source(), c);
      EXPECT_EQ(r.destination(), m);
      EXPECT_EQ(make_route(g, r.hops), r);
      EXPECT_TRUE(seen.insert(r.hops).second) << "duplicate candidate";
      if (i > 0) {
        EXPECT_LE(paths[i - 1].length(), r.length());
      }
    }
    const auto capped = candidate_paths(g, t, c, m, 1);
    EXPECT_EQ(capped.size(), 1u);
    EXPECT_EQ(capped[0], paths[0]);
  }
}

TEST(RoutingProperty, BaselineMatchesExhaustiveCheapest) {
  Rng rng(606);
  std::size_t routed = 0;
  for (int trial = 0; trial < 150; ++trial) {
    testing::GraphShape shape;
    shape.nodes = 4 + rng.below(5);
    shape.extra_channels = rng.below(8);
    shape.base_fee_max = 5;
    const ChannelGraph g = testing::random_graph(rng, shape);
    const NodeId c{static_cast<std::uint32_t>(rng.below(shape.nodes))};
    const NodeId m{static_cast<std::uint32_t>((c.value + 1 + rng.below(shape.nodes - 1)) % shape.nodes)};
    const Sat amount = rng.between(1, 120);
    const auto expected = testing::brute_force_cheapest(g, c, m, amount);
    try {
      const Route r = ln_route(g, c, m, amount);
      ASSERT_TRUE(expected) << "trial " << trial;
      EXPECT_TRUE(is_simple(r));
      EXPECT_EQ(route_fee(g, r, amount), expected->first) << "trial " << trial;
      EXPECT_EQ(r.length(), expected->second) << "trial " << trial;
      ++routed;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NoRoute);
      EXPECT_FALSE(expected) << "trial " << trial;
    }
  }
  EXPECT_GT(routed, 50u);
}

TEST(TopologyProperty, TransfersPreserveCapacity) {
  Rng rng(707);
  for (int trial = 0; trial < 40; ++trial) {
    ChannelGraph g = testing::random_graph(rng, {});
    for (int k = 0; k < 50; ++k) {
      const ChannelId c{static_cast<std::uint32_t>(rng.below(g.channel_count()))};
      const Channel& ch = g.channel(c);
      const NodeId from = rng.below(2) ? ch.a : ch.b;
      const Sat amount = rng.between(0, ch.balance_of(from));
      if (rng.below(2)) {
        apply_transfer(g, c, from, amount);
      } else {
        g.lock(c, from, amount);
        g.release(c, rng.below(2) ? ch.a : ch.b, amount);
      }
      const Channel& after = g.channel(c);
      ASSERT_EQ(after.balance_a + after.balance_b + after.in_flight, after.capacity);
      ASSERT_GE(after.balance_a, 0);
      ASSERT_GE(after.balance_b, 0);
    }
  }
}

TEST(VdpProperty, SolutionsPassTheirOwnChecks) {
  Rng rng(808);
  for (int trial = 0; trial < 200; ++trial) {
    const VdpInstance in = testing::random_vdp_instance(rng, 4, 3, 100);
    try {
      const VdpSolution s = solve_vdp(in);
      const SplitCheck check = check_split(in, s.shares);
      EXPECT_TRUE(check.feasible) << check.violation;
      EXPECT_EQ(check.total_fees, s.total_fees);
      EXPECT_EQ(network_congestion(in, s.shares), s.network_congestion);
      EXPECT_LE(s.lower_bound, s.network_congestion.to_double() + 1e-9);
      const auto guarded = guard_value_privacy(in, s.shares);
      EXPECT_TRUE(check_split(in, guarded).feasible);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NoFeasibleSplit);
    }
  }
}

}  // namespace
}  // namespace rapido
