#pragma once

#include <cstdint>
#include <vector>

#include "rapido/topology.hpp"
#include "rapido/types.hpp"

namespace rapido {

using Portion = std::vector<NodeId>;

/// One election period: a beacon per portion, listed in portion order.
struct BeaconEpoch {
  std::uint64_t epoch_index = 0;
  SimTime period_length = 12 * 3600;
  std::vector<NodeId> beacons;
  std::uint64_t seed = 0;

  bool is_beacon(NodeId n) const;
};

/// Splits the nodes into min(h, node_count) disjoint, nonempty portions whose
/// sizes differ by at most one. Nodes are ordered by a seeded hash of their
/// name and dealt round-robin, so membership is independent of topology.
std::vector<Portion> partition_topology(const ChannelGraph& graph, std::size_t h, std::uint64_t seed);

/// Draws one beacon uniformly from each portion. The draw for a portion
/// depends only on (seed, epoch_index, portion index).
BeaconEpoch elect_beacons(const std::vector<Portion>& portions, std::uint64_t epoch_index, std::uint64_t seed,
                          SimTime period_length = 12 * 3600);

}  // namespace rapido
