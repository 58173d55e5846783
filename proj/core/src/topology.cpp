#include "rapido/topology.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "rapido/error.hpp"
#include "rapido/rng.hpp"

namespace rapido {

// ---------------------------------------------------------------------------
// ChannelGraph

std::size_t ChannelGraph::open_channel_count() const {
  return static_cast<std::size_t>(
      std::count_if(channels_.begin(), channels_.end(), [](const Channel& c) { return c.open; }));
}

const std::string& ChannelGraph::name(NodeId n) const {
  if (!n.valid() || n.value >= names_.size()) throw Error(ErrorCode::UnknownNode, "node index out of range");
  return names_[n.value];
}

std::optional<NodeId> ChannelGraph::find_node(std::string_view name) const {
  const auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

NodeId ChannelGraph::node(std::string_view name) const {
  if (auto n = find_node(name)) return *n;
  throw Error(ErrorCode::UnknownNode, std::string(name));
}

const FeePolicy& ChannelGraph::fee_policy(NodeId n) const {
  if (!n.valid() || n.value >= fees_.size()) throw Error(ErrorCode::UnknownNode, "node index out of range");
  return fees_[n.value];
}

void ChannelGraph::set_fee_policy(NodeId n, FeePolicy policy) {
  if (!n.valid() || n.value >= fees_.size()) throw Error(ErrorCode::UnknownNode, "node index out of range");
  fees_[n.value] = policy;
}

const Channel& ChannelGraph::channel(ChannelId c) const {
  if (!c.valid() || c.value >= channels_.size()) throw Error(ErrorCode::UnknownChannel, "channel index out of range");
  return channels_[c.value];
}

Channel& ChannelGraph::mutable_channel(ChannelId c) {
  if (!c.valid() || c.value >= channels_.size()) throw Error(ErrorCode::UnknownChannel, "channel index out of range");
  return channels_[c.value];
}

std::span<const ChannelId> ChannelGraph::incident(NodeId n) const {
  if (!n.valid() || n.value >= adjacency_.size()) throw Error(ErrorCode::UnknownNode, "node index out of range");
  return adjacency_[n.value];
}

std::uint64_t ChannelGraph::pair_key(NodeId x, NodeId y) {
  const auto lo = std::min(x.value, y.value);
  const auto hi = std::max(x.value, y.value);
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

std::optional<ChannelId> ChannelGraph::find_channel(NodeId x, NodeId y) const {
  const auto it = by_pair_.find(pair_key(x, y));
  if (it == by_pair_.end()) return std::nullopt;
  return it->second;
}

Sat ChannelGraph::total_capacity() const {
  Sat total = 0;
  for (const auto& c : channels_) {
    if (c.open) total += c.capacity;
  }
  return total;
}

void ChannelGraph::transfer(ChannelId id, NodeId from, Sat amount) {
  auto& c = mutable_channel(id);
  if (!c.has_endpoint(from)) throw Error(ErrorCode::InvalidChannel, "sender is not an endpoint");
  if (!c.open) throw Error(ErrorCode::InvalidChannel, "channel is closed");
  if (amount < 0) throw Error(ErrorCode::InsufficientBalance, "negative transfer");
  Sat& src = from == c.a ? c.balance_a : c.balance_b;
  Sat& dst = from == c.a ? c.balance_b : c.balance_a;
  if (src < amount) throw Error(ErrorCode::InsufficientBalance, "transfer exceeds sender balance");
  src -= amount;
  dst += amount;
}

void ChannelGraph::lock(ChannelId id, NodeId from, Sat amount) {
  auto& c = mutable_channel(id);
  if (!c.has_endpoint(from)) throw Error(ErrorCode::InvalidChannel, "sender is not an endpoint");
  if (!c.open) throw Error(ErrorCode::InvalidChannel, "channel is closed");
  Sat& src = from == c.a ? c.balance_a : c.balance_b;
  if (amount < 0 || src < amount) throw Error(ErrorCode::InsufficientBalance, "lock exceeds sender balance");
  src -= amount;
  c.in_flight += amount;
  ++c.open_contracts;
}

void ChannelGraph::release(ChannelId id, NodeId to, Sat amount) {
  auto& c = mutable_channel(id);
  if (!c.has_endpoint(to)) throw Error(ErrorCode::InvalidChannel, "recipient is not an endpoint");
  if (amount < 0 || c.in_flight < amount || c.open_contracts <= 0) {
    throw Error(ErrorCode::InvalidChannel, "release exceeds locked funds");
  }
  c.in_flight -= amount;
  --c.open_contracts;
  (to == c.a ? c.balance_a : c.balance_b) += amount;
}

void ChannelGraph::set_balances(ChannelId id, Sat balance_a, Sat balance_b) {
  auto& c = mutable_channel(id);
  if (balance_a < 0 || balance_b < 0 || balance_a + balance_b + c.in_flight != c.capacity) {
    throw Error(ErrorCode::InvalidChannel, "balances must be nonnegative and sum to capacity");
  }
  c.balance_a = balance_a;
  c.balance_b = balance_b;
}

ChannelId ChannelGraph::open_channel(NodeId a, NodeId b, Sat fund_a, Sat fund_b) {
  if (a == b) throw Error(ErrorCode::InvalidChannel, "channel endpoints must differ");
  (void)name(a);
  (void)name(b);
  if (fund_a < 0 || fund_b < 0 || fund_a + fund_b <= 0) {
    throw Error(ErrorCode::InvalidChannel, "channel capacity must be positive");
  }
  if (b < a) {
    std::swap(a, b);
    std::swap(fund_a, fund_b);
  }
  ChannelId id;
  if (auto existing = find_channel(a, b)) {
    auto& c = mutable_channel(*existing);
    if (c.open) throw Error(ErrorCode::InvalidChannel, "channel already open between pair");
    id = *existing;
  } else {
    id = ChannelId{static_cast<std::uint32_t>(channels_.size())};
    channels_.emplace_back();
    by_pair_.emplace(pair_key(a, b), id);
  }
  auto& c = channels_[id.value];
  c = Channel{};
  c.a = a;
  c.b = b;
  c.capacity = fund_a + fund_b;
  c.balance_a = fund_a;
  c.balance_b = fund_b;
  rebuild_adjacency(a);
  rebuild_adjacency(b);
  return id;
}

void ChannelGraph::close_channel(ChannelId id) {
  auto& c = mutable_channel(id);
  if (!c.open) throw Error(ErrorCode::InvalidChannel, "channel already closed");
  c.open = false;
  rebuild_adjacency(c.a);
  rebuild_adjacency(c.b);
}

void ChannelGraph::rebuild_adjacency(NodeId n) {
  auto& adj = adjacency_[n.value];
  adj.clear();
  // Channel records are few per node in practice; a scan over by_pair_ would
  // be worse, so walk all channels only when topology changes.
  for (std::uint32_t i = 0; i < channels_.size(); ++i) {
    const auto& c = channels_[i];
    if (c.open && c.has_endpoint(n)) adj.push_back(ChannelId{i});
  }
  std::sort(adj.begin(), adj.end(), [&](ChannelId x, ChannelId y) {
    return channels_[x.value].peer(n) < channels_[y.value].peer(n);
  });
}

void apply_transfer(ChannelGraph& graph, ChannelId c, NodeId from, Sat amount) { graph.transfer(c, from, amount); }

// ---------------------------------------------------------------------------
// GraphBuilder

void GraphBuilder::add_node(std::string name, FeePolicy policy) { nodes_.emplace_back(std::move(name), policy); }

void GraphBuilder::add_channel(std::string a, std::string b, Sat capacity) {
  channels_.push_back({std::move(a), std::move(b), capacity, std::nullopt});
}

void GraphBuilder::add_channel(std::string a, std::string b, Sat capacity, Sat balance_a, Sat balance_b) {
  channels_.push_back({std::move(a), std::move(b), capacity, std::pair{balance_a, balance_b}});
}

ChannelGraph GraphBuilder::build() && {
  ChannelGraph g;
  std::sort(nodes_.begin(), nodes_.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i > 0 && nodes_[i].first == nodes_[i - 1].first) {
      throw Error(ErrorCode::MalformedSnapshot, "duplicate node id '" + nodes_[i].first + "'");
    }
    if (nodes_[i].second.base_fee < 0 || nodes_[i].second.fee_rate_ppm < 0) {
      throw Error(ErrorCode::MalformedSnapshot, "negative fee policy on '" + nodes_[i].first + "'");
    }
    const NodeId id{static_cast<std::uint32_t>(i)};
    g.by_name_.emplace(nodes_[i].first, id);
    g.names_.push_back(std::move(nodes_[i].first));
    g.fees_.push_back(nodes_[i].second);
  }
  g.adjacency_.resize(g.names_.size());

  for (auto& pending : channels_) {
    const auto a = g.find_node(pending.a);
    const auto b = g.find_node(pending.b);
    if (!a || !b) {
      throw Error(ErrorCode::DanglingEndpoint,
                  "channel " + pending.a + "-" + pending.b + " references an unknown node");
    }
    if (*a == *b) throw Error(ErrorCode::MalformedSnapshot, "self channel on '" + pending.a + "'");
    if (pending.capacity <= 0) throw Error(ErrorCode::MalformedSnapshot, "channel capacity must be positive");
    Sat bal_a = 0;
    Sat bal_b = 0;
    if (pending.balances) {
      bal_a = pending.balances->first;
      bal_b = pending.balances->second;
      if (bal_a < 0 || bal_b < 0 || bal_a + bal_b != pending.capacity) {
        throw Error(ErrorCode::MalformedSnapshot, "channel balances must sum to capacity");
      }
    }
    // Normalise orientation so endpoint a is the smaller id.
    NodeId lo = *a;
    NodeId hi = *b;
    if (hi < lo) {
      std::swap(lo, hi);
      std::swap(bal_a, bal_b);
    }
    if (auto existing = g.find_channel(lo, hi)) {
      auto& c = g.channels_[existing->value];
      c.capacity += pending.capacity;
      c.balance_a += bal_a;
      c.balance_b += bal_b;
      continue;
    }
    const ChannelId id{static_cast<std::uint32_t>(g.channels_.size())};
    Channel c;
    c.a = lo;
    c.b = hi;
    c.capacity = pending.capacity;
    c.balance_a = bal_a;
    c.balance_b = bal_b;
    g.channels_.push_back(c);
    g.by_pair_.emplace(ChannelGraph::pair_key(lo, hi), id);
    g.adjacency_[lo.value].push_back(id);
    g.adjacency_[hi.value].push_back(id);
  }
  for (std::uint32_t n = 0; n < g.adjacency_.size(); ++n) {
    auto& adj = g.adjacency_[n];
    std::sort(adj.begin(), adj.end(), [&](ChannelId x, ChannelId y) {
      return g.channels_[x.value].peer(NodeId{n}) < g.channels_[y.value].peer(NodeId{n});
    });
  }
  return g;
}

// ---------------------------------------------------------------------------
// Synthetic topology

namespace {

/// Integer log-uniform draw: pick an octave [lo*2^k, lo*2^(k+1)) uniformly,
/// then a uniform value inside it, clipped to hi. Avoids libm so the output is
/// identical on every platform.
std::int64_t log_uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  int octaves = 0;
  for (std::int64_t v = lo; v <= hi / 2; v *= 2) ++octaves;
  const auto k = static_cast<int>(rng.below(static_cast<std::uint64_t>(octaves) + 1));
  const std::int64_t start = lo << k;
  const std::int64_t end = std::min(hi, (start * 2) - 1);
  return rng.between(start, std::max(start, end));
}

std::string synth_name(std::size_t index, std::size_t count) {
  std::size_t width = 1;
  for (std::size_t v = count > 0 ? count - 1 : 0; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(index);
  return "n" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

ChannelGraph generate_synthetic_graph(std::size_t node_count, std::size_t channel_count, std::uint64_t seed,
                                      const SynthParams& params) {
  if (node_count == 0) throw Error(ErrorCode::InfeasibleShape, "node_count must be positive");
  if (channel_count + 1 < node_count) {
    throw Error(ErrorCode::InfeasibleShape, "channel_count must be at least node_count - 1");
  }
  const std::uint64_t max_pairs = static_cast<std::uint64_t>(node_count) * (node_count - 1) / 2;
  if (channel_count > max_pairs) throw Error(ErrorCode::InfeasibleShape, "more channels than node pairs");
  if (params.capacity_min <= 0 || params.capacity_max < params.capacity_min) {
    throw Error(ErrorCode::InfeasibleShape, "invalid capacity range");
  }

  Rng rng(mix64(seed, 0x7090));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(channel_count);
  std::unordered_set<std::uint64_t> present;
  std::vector<std::uint32_t> endpoints;  // each edge contributes both ends
  endpoints.reserve(channel_count * 2);

  auto key = [](std::uint32_t x, std::uint32_t y) {
    return (static_cast<std::uint64_t>(std::min(x, y)) << 32) | std::max(x, y);
  };
  auto add_edge = [&](std::uint32_t x, std::uint32_t y) {
    present.insert(key(x, y));
    edges.emplace_back(x, y);
    endpoints.push_back(x);
    endpoints.push_back(y);
  };

  const std::size_t extra = channel_count - (node_count - 1);
  std::size_t carry = 0;
  std::vector<std::uint32_t> targets;
  for (std::size_t i = 1; i < node_count; ++i) {
    const std::size_t quota = 1 + extra * i / (node_count - 1) - extra * (i - 1) / (node_count - 1) + carry;
    const std::size_t k = std::min(quota, i);
    carry = quota - k;
    targets.clear();
    std::size_t attempts = 0;
    while (targets.size() < k && attempts < 64 * k) {
      ++attempts;
      std::uint32_t t = 0;
      // Mostly preferential; a uniform share keeps low-degree nodes reachable.
      if (!endpoints.empty() && rng.unit() < 0.9) {
        t = endpoints[rng.below(endpoints.size())];
      } else {
        t = static_cast<std::uint32_t>(rng.below(i));
      }
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (std::uint32_t t = static_cast<std::uint32_t>(rng.below(i)); targets.size() < k; t = (t + 1) % i) {
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (const auto t : targets) add_edge(static_cast<std::uint32_t>(i), t);
  }
  while (carry > 0) {
    const auto x = static_cast<std::uint32_t>(rng.below(node_count));
    const auto y = static_cast<std::uint32_t>(rng.below(node_count));
    if (x == y || present.contains(key(x, y))) continue;
    add_edge(x, y);
    --carry;
  }

  GraphBuilder builder;
  for (std::size_t i = 0; i < node_count; ++i) {
    FeePolicy policy;
    policy.base_fee = rng.between(0, params.base_fee_max);
    policy.fee_rate_ppm = log_uniform(rng, params.fee_rate_min_ppm, params.fee_rate_max_ppm);
    builder.add_node(synth_name(i, node_count), policy);
  }
  for (const auto& [x, y] : edges) {
    builder.add_channel(synth_name(x, node_count), synth_name(y, node_count),
                        log_uniform(rng, params.capacity_min, params.capacity_max));
  }
  return std::move(builder).build();
}

ChannelGraph assign_deposits(ChannelGraph graph) {
  for (std::uint32_t i = 0; i < graph.channel_count(); ++i) {
    const ChannelId id{i};
    const Channel& c = graph.channel(id);
    if (!c.open || c.in_flight != 0) continue;
    const auto deg_a = graph.degree(c.a);
    const auto deg_b = graph.degree(c.b);
    Sat bal_a = 0;
    if (deg_a > deg_b) {
      bal_a = c.capacity * 8 / 10;
    } else if (deg_b > deg_a) {
      bal_a = c.capacity - c.capacity * 8 / 10;
    } else {
      // a is always the lexicographically smaller endpoint.
      bal_a = c.capacity - c.capacity / 2;
    }
    graph.set_balances(id, bal_a, c.capacity - bal_a);
  }
  return graph;
}

}  // namespace rapido
