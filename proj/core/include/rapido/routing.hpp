#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rapido/beacon.hpp"
#include "rapido/topology.hpp"
#include "rapido/types.hpp"

namespace rapido {

/// A simple path. channels[j] joins hops[j] and hops[j + 1].
struct Route {
  std::vector<NodeId> hops;
  std::vector<ChannelId> channels;

  std::size_t length() const { return channels.size(); }
  NodeId source() const { return hops.front(); }
  NodeId destination() const { return hops.back(); }

  friend bool operator==(const Route&, const Route&) = default;
};

/// Builds a route from a node sequence. Throws InvalidRoute if consecutive
/// nodes share no open channel or a node repeats.
Route make_route(const ChannelGraph& graph, const std::vector<NodeId>& nodes);

/// Removes cycles from a walk: whenever a node reappears, everything after
/// its first occurrence is spliced out.
std::vector<NodeId> remove_loops(const std::vector<NodeId>& walk);

/// Fewest hops from one node to another over open channels, ignoring
/// balances and fees; nullopt when unreachable.
std::optional<std::size_t> hop_distance(const ChannelGraph& graph, NodeId from, NodeId to);

struct RoutingTable {
  NodeId owner;
  std::map<NodeId, Route> entries;  // beacon -> route owner..beacon
  std::uint64_t epoch_index = 0;

  bool stale(std::uint64_t current_epoch) const { return epoch_index != current_epoch; }
};

/// Proactive state for one beacon epoch: a BFS tree rooted at every beacon.
/// Next hops break ties toward the smallest node id. Tables are materialised
/// on demand from the trees.
class RoutingTables {
 public:
  RoutingTables() = default;

  std::uint64_t epoch_index() const { return epoch_index_; }
  const std::vector<NodeId>& beacons() const { return beacons_; }

  /// Hop distance from n to beacon k, if reachable.
  std::optional<std::uint32_t> distance(NodeId n, std::size_t beacon_index) const;
  /// Node sequence n..beacon k, if reachable.
  std::optional<std::vector<NodeId>> path_to_beacon(NodeId n, std::size_t beacon_index) const;

  RoutingTable table(const ChannelGraph& graph, NodeId owner) const;

 private:
  friend RoutingTables proactive_update(const ChannelGraph& graph, const BeaconEpoch& epoch);

  static constexpr std::uint32_t kUnreached = 0xFFFFFFFFu;
  std::uint64_t epoch_index_ = 0;
  std::vector<NodeId> beacons_;
  std::vector<std::vector<std::uint32_t>> dist_;  // [beacon][node]
  std::vector<std::vector<NodeId>> next_;         // [beacon][node]
};

RoutingTables proactive_update(const ChannelGraph& graph, const BeaconEpoch& epoch);

/// One de-looped customer-to-merchant walk per beacon both can reach, in
/// beacon order, paired with that beacon's index. Not deduplicated; walks
/// that collapse to a single node are skipped.
std::vector<std::pair<std::size_t, std::vector<NodeId>>> beacon_routes(const RoutingTables& tables, NodeId customer,
                                                                      NodeId merchant);

/// Customer-to-merchant paths composed through every beacon both can reach,
/// de-looped, deduplicated, and sorted by (length, smallest beacon id).
/// max_candidates == 0 keeps all of them. Throws NoCandidatePath.
std::vector<Route> candidate_paths(const ChannelGraph& graph, const RoutingTables& tables, NodeId customer,
                                   NodeId merchant, std::size_t max_candidates = 10);

/// Current channel state along a route. sendable[j] is what hops[j] can push
/// through channels[j]; receivable[j] is the opposite side. forwarder_fee[j]
/// is the policy of hops[j + 1], which charges it when forwarding onward.
struct PathProbe {
  Route route;
  std::vector<Sat> sendable;
  std::vector<Sat> receivable;
  std::vector<FeePolicy> forwarder_fee;
};

/// Throws StaleRoute when a channel on the route is closed or no longer
/// joins the listed nodes.
PathProbe reactive_probe(const ChannelGraph& graph, const Route& route);

/// Baseline single-path router: Dijkstra from the merchant backwards, with
/// edge cost the forwarding fee on the amount that must cross that edge, and
/// only edges whose sender can cover it. Ties: fewer hops, then smaller next
/// hop. Throws NoRoute.
Route ln_route(const ChannelGraph& graph, NodeId customer, NodeId merchant, Sat amount);

}  // namespace rapido
