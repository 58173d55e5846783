#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rapido/ledger.hpp"
#include "rapido/rng.hpp"
#include "rapido/topology.hpp"
#include "rapido/types.hpp"
#include "rapido/vdp.hpp"

namespace rapido::testing {

/// Exact rational with 128-bit cross multiplication, kept separate from the
/// library's Ratio so oracle comparisons do not share code with the subject.
struct Frac {
  __int128 num = 0;
  __int128 den = 1;
};
bool frac_less(const Frac& a, const Frac& b);
bool frac_equal(const Frac& a, const Frac& b);

/// Minimum achievable max-congestion over every integer split, found by
/// enumerating all compositions of the payment value. The feasibility rules
/// are re-derived here from their definitions: forwarded amounts compound
/// fees from the merchant backwards, every link carries strictly less than
/// its deposit, fees stay within budget, and the threshold rule applies per
/// loaded link. nullopt when no split is feasible.
std::optional<Frac> brute_force_vdp(const VdpInstance& instance);

/// Hop distances from src by breadth-first search over open channels;
/// -1 marks unreachable nodes.
std::vector<int> bfs_distances(const ChannelGraph& graph, NodeId src);

/// Cheapest (fee, hops) over every simple path where each sender can cover
/// its forwarded amount. Exponential; only for small graphs.
std::optional<std::pair<Sat, std::size_t>> brute_force_cheapest(const ChannelGraph& graph, NodeId from, NodeId to,
                                                                Sat amount);

/// Holdings per node: on-chain plus own side of every open channel.
std::vector<Sat> holdings(const ChannelGraph& graph, const Ledger& ledger);

struct GraphShape {
  std::size_t nodes = 6;
  std::size_t extra_channels = 4;
  Sat capacity_min = 10;
  Sat capacity_max = 200;
  Sat base_fee_max = 2;
  std::int64_t rate_max_ppm = 20'000;
};

/// Connected random graph (spanning tree plus extra distinct channels) with
/// random two-sided balances and fee policies. Node names are n00, n01, ...
ChannelGraph random_graph(Rng& rng, const GraphShape& shape);

/// Random small split instance: up to max_paths paths of up to max_hops
/// hops, links possibly shared between paths.
VdpInstance random_vdp_instance(Rng& rng, std::size_t max_paths = 4, std::size_t max_hops = 3, Sat max_value = 100);

}  // namespace rapido::testing
