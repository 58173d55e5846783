#include "rapido/beacon.hpp"

#include <algorithm>

#include "rapido/error.hpp"
#include "rapido/rng.hpp"

namespace rapido {

bool BeaconEpoch::is_beacon(NodeId n) const { return std::find(beacons.begin(), beacons.end(), n) != beacons.end(); }

std::vector<Portion> partition_topology(const ChannelGraph& graph, std::size_t h, std::uint64_t seed) {
  if (h == 0) throw Error(ErrorCode::BadConfig, "beacon count must be positive");
  const std::size_t n = graph.node_count();
  std::vector<std::pair<std::uint64_t, NodeId>> keyed;
  keyed.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const NodeId id{i};
    keyed.emplace_back(mix64(fnv1a64(graph.name(id)), seed), id);
  }
  std::sort(keyed.begin(), keyed.end());

  std::vector<Portion> portions(std::min(h, n));
  for (std::size_t rank = 0; rank < keyed.size(); ++rank) {
    portions[rank % portions.size()].push_back(keyed[rank].second);
  }
  for (auto& p : portions) std::sort(p.begin(), p.end());
  return portions;
}

BeaconEpoch elect_beacons(const std::vector<Portion>& portions, std::uint64_t epoch_index, std::uint64_t seed,
                          SimTime period_length) {
  BeaconEpoch epoch;
  epoch.epoch_index = epoch_index;
  epoch.period_length = period_length;
  epoch.seed = seed;
  epoch.beacons.reserve(portions.size());
  for (std::size_t k = 0; k < portions.size(); ++k) {
    const auto& portion = portions[k];
    if (portion.empty()) throw Error(ErrorCode::BadConfig, "empty portion");
    Rng rng(mix64(seed, epoch_index, k));
    epoch.beacons.push_back(portion[rng.below(portion.size())]);
  }
  return epoch;
}

}  // namespace rapido
