#include "rapido/routing.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <tuple>

#include "rapido/error.hpp"

namespace rapido {

Route make_route(const ChannelGraph& graph, const std::vector<NodeId>& nodes) {
  if (nodes.empty()) throw Error(ErrorCode::InvalidRoute, "empty node sequence");
  Route r;
  r.hops = nodes;
  std::set<NodeId> seen;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (!seen.insert(nodes[j]).second) throw Error(ErrorCode::InvalidRoute, "route repeats a node");
    if (j == 0) continue;
    const auto c = graph.find_channel(nodes[j - 1], nodes[j]);
    if (!c || !graph.channel(*c).open) throw Error(ErrorCode::InvalidRoute, "no open channel between consecutive hops");
    r.channels.push_back(*c);
  }
  return r;
}

std::vector<NodeId> remove_loops(const std::vector<NodeId>& walk) {
  std::vector<NodeId> out;
  out.reserve(walk.size());
  for (const NodeId n : walk) {
    const auto it = std::find(out.begin(), out.end(), n);
    if (it != out.end()) {
      out.erase(it + 1, out.end());
    } else {
      out.push_back(n);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Proactive part

std::optional<std::uint32_t> RoutingTables::distance(NodeId n, std::size_t k) const {
  if (k >= dist_.size() || n.value >= dist_[k].size()) return std::nullopt;
  const auto d = dist_[k][n.value];
  if (d == kUnreached) return std::nullopt;
  return d;
}

std::optional<std::vector<NodeId>> RoutingTables::path_to_beacon(NodeId n, std::size_t k) const {
  if (!distance(n, k)) return std::nullopt;
  std::vector<NodeId> path{n};
  NodeId cur = n;
  while (cur != beacons_[k]) {
    cur = next_[k][cur.value];
    path.push_back(cur);
  }
  return path;
}

RoutingTable RoutingTables::table(const ChannelGraph& graph, NodeId owner) const {
  RoutingTable t;
  t.owner = owner;
  t.epoch_index = epoch_index_;
  for (std::size_t k = 0; k < beacons_.size(); ++k) {
    if (auto p = path_to_beacon(owner, k)) t.entries.emplace(beacons_[k], make_route(graph, *p));
  }
  return t;
}

RoutingTables proactive_update(const ChannelGraph& graph, const BeaconEpoch& epoch) {
  RoutingTables t;
  t.epoch_index_ = epoch.epoch_index;
  t.beacons_ = epoch.beacons;
  const std::size_t n = graph.node_count();
  t.dist_.assign(epoch.beacons.size(), std::vector<std::uint32_t>(n, RoutingTables::kUnreached));
  t.next_.assign(epoch.beacons.size(), std::vector<NodeId>(n));

  std::vector<NodeId> order;
  order.reserve(n);
  for (std::size_t k = 0; k < epoch.beacons.size(); ++k) {
    auto& dist = t.dist_[k];
    auto& next = t.next_[k];
    const NodeId root = epoch.beacons[k];
    if (root.value >= n) throw Error(ErrorCode::UnknownNode, "beacon not in graph");
    order.clear();
    dist[root.value] = 0;
    next[root.value] = root;
    order.push_back(root);
    for (std::size_t head = 0; head < order.size(); ++head) {
      const NodeId u = order[head];
      // Neighbours come in ascending id order, so the first node to reach v
      // from the previous BFS layer is v's smallest-id next hop.
      for (const ChannelId c : graph.incident(u)) {
        const NodeId v = graph.channel(c).peer(u);
        if (dist[v.value] != RoutingTables::kUnreached) continue;
        dist[v.value] = dist[u.value] + 1;
        order.push_back(v);
      }
    }
    for (const NodeId v : order) {
      if (v == root) continue;
      for (const ChannelId c : graph.incident(v)) {
        const NodeId w = graph.channel(c).peer(v);
        if (dist[w.value] + 1 == dist[v.value]) {
          next[v.value] = w;
          break;
        }
      }
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Candidate composition

std::optional<std::size_t> hop_distance(const ChannelGraph& graph, NodeId from, NodeId to) {
  if (from.value >= graph.node_count() || to.value >= graph.node_count()) {
    throw Error(ErrorCode::UnknownNode, "node not in graph");
  }
  constexpr std::uint32_t kFar = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> dist(graph.node_count(), kFar);
  std::vector<NodeId> order{from};
  dist[from.value] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const NodeId u = order[head];
    if (u == to) return dist[u.value];
    for (const ChannelId c : graph.incident(u)) {
      const NodeId v = graph.channel(c).peer(u);
      if (dist[v.value] != kFar) continue;
      dist[v.value] = dist[u.value] + 1;
      order.push_back(v);
    }
  }
  return std::nullopt;
}

std::vector<std::pair<std::size_t, std::vector<NodeId>>> beacon_routes(const RoutingTables& tables, NodeId customer,
                                                                      NodeId merchant) {
  std::vector<std::pair<std::size_t, std::vector<NodeId>>> out;
  for (std::size_t k = 0; k < tables.beacons().size(); ++k) {
    auto up = tables.path_to_beacon(customer, k);
    auto down = tables.path_to_beacon(merchant, k);
    if (!up || !down) continue;
    std::vector<NodeId> walk = std::move(*up);
    walk.insert(walk.end(), down->rbegin() + 1, down->rend());
    auto simple = remove_loops(walk);
    if (simple.size() < 2) continue;
    out.emplace_back(k, std::move(simple));
  }
  return out;
}

std::vector<Route> candidate_paths(const ChannelGraph& graph, const RoutingTables& tables, NodeId customer,
                                   NodeId merchant, std::size_t max_candidates) {
  struct Candidate {
    std::vector<NodeId> nodes;
    NodeId first_beacon;
  };
  std::vector<Candidate> found;
  for (auto& [k, simple] : beacon_routes(tables, customer, merchant)) {
    const NodeId beacon = tables.beacons()[k];
    auto same = std::find_if(found.begin(), found.end(), [&](const Candidate& c) { return c.nodes == simple; });
    if (same != found.end()) {
      same->first_beacon = std::min(same->first_beacon, beacon);
    } else {
      found.push_back({std::move(simple), beacon});
    }
  }
  if (found.empty()) {
    throw Error(ErrorCode::NoCandidatePath, graph.name(customer) + " -> " + graph.name(merchant));
  }
  std::sort(found.begin(), found.end(), [](const Candidate& x, const Candidate& y) {
    if (x.nodes.size() != y.nodes.size()) return x.nodes.size() < y.nodes.size();
    if (x.first_beacon != y.first_beacon) return x.first_beacon < y.first_beacon;
    return x.nodes < y.nodes;
  });
  if (max_candidates > 0 && found.size() > max_candidates) found.resize(max_candidates);

  std::vector<Route> routes;
  routes.reserve(found.size());
  for (const auto& c : found) routes.push_back(make_route(graph, c.nodes));
  return routes;
}

// ---------------------------------------------------------------------------
// Reactive part

PathProbe reactive_probe(const ChannelGraph& graph, const Route& route) {
  PathProbe probe;
  probe.route = route;
  if (route.hops.size() != route.channels.size() + 1) throw Error(ErrorCode::InvalidRoute, "malformed route");
  for (std::size_t j = 0; j < route.channels.size(); ++j) {
    const Channel& c = graph.channel(route.channels[j]);
    const NodeId from = route.hops[j];
    const NodeId to = route.hops[j + 1];
    if (!c.open || !c.has_endpoint(from) || !c.has_endpoint(to)) {
      throw Error(ErrorCode::StaleRoute, "channel " + std::to_string(route.channels[j].value) + " is no longer usable");
    }
    probe.sendable.push_back(c.balance_of(from));
    probe.receivable.push_back(c.balance_of(to));
    probe.forwarder_fee.push_back(graph.fee_policy(to));
  }
  return probe;
}

// ---------------------------------------------------------------------------
// Baseline router

Route ln_route(const ChannelGraph& graph, NodeId customer, NodeId merchant, Sat amount) {
  if (amount <= 0) throw Error(ErrorCode::InvalidRoute, "amount must be positive");
  if (customer == merchant) throw Error(ErrorCode::NoRoute, "customer and merchant coincide");
  const std::size_t n = graph.node_count();
  constexpr Sat kInf = std::numeric_limits<Sat>::max();

  // inbound[v]: what must be sent into v for the merchant to receive amount.
  // For the customer it is what the customer pushes into its first hop.
  std::vector<Sat> inbound(n, kInf);
  std::vector<std::uint32_t> hops(n, 0);
  std::vector<NodeId> next(n);
  std::vector<bool> settled(n, false);
  using Entry = std::tuple<Sat, std::uint32_t, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

  inbound[merchant.value] = amount;
  queue.emplace(amount, 0, merchant.value);
  while (!queue.empty()) {
    const auto [cost, h, vi] = queue.top();
    queue.pop();
    const NodeId v{vi};
    if (settled[vi]) continue;
    settled[vi] = true;
    if (v == customer) break;
    for (const ChannelId c : graph.incident(v)) {
      const Channel& ch = graph.channel(c);
      const NodeId u = ch.peer(v);
      if (settled[u.value] || u == merchant) continue;
      if (ch.balance_of(u) < cost) continue;
      const Sat candidate = u == customer ? cost : cost + graph.fee_policy(u).fee(cost);
      const std::uint32_t cand_hops = h + 1;
      const bool better = std::tie(candidate, cand_hops) < std::tie(inbound[u.value], hops[u.value]) ||
                          (candidate == inbound[u.value] && cand_hops == hops[u.value] && v < next[u.value]);
      if (!better) continue;
      inbound[u.value] = candidate;
      hops[u.value] = cand_hops;
      next[u.value] = v;
      queue.emplace(candidate, cand_hops, u.value);
    }
  }
  if (!settled[customer.value]) {
    throw Error(ErrorCode::NoRoute, "no fee-and-capacity-feasible path from " + graph.name(customer) + " to " +
                                        graph.name(merchant));
  }
  std::vector<NodeId> nodes{customer};
  for (NodeId cur = customer; cur != merchant;) {
    cur = next[cur.value];
    nodes.push_back(cur);
  }
  return make_route(graph, nodes);
}

}  // namespace rapido
