#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rapido/types.hpp"

namespace rapido {

/// Per-node forwarding fee: base plus a parts-per-million rate on the
/// forwarded amount, floored to whole satoshis.
struct FeePolicy {
  Sat base_fee = 0;
  std::int64_t fee_rate_ppm = 0;

  Sat fee(Sat amount) const {
    return base_fee + static_cast<Sat>(static_cast<__int128>(amount) * fee_rate_ppm / 1'000'000);
  }

  friend bool operator==(const FeePolicy&, const FeePolicy&) = default;
};

/// A bidirectional payment channel. Funds locked by open contracts sit in
/// in_flight until the contract settles, so
/// balance_a + balance_b + in_flight == capacity at all times.
struct Channel {
  NodeId a;
  NodeId b;
  Sat capacity = 0;
  Sat balance_a = 0;
  Sat balance_b = 0;
  Sat in_flight = 0;
  int open_contracts = 0;
  bool open = true;

  bool has_endpoint(NodeId n) const { return n == a || n == b; }
  NodeId peer(NodeId n) const { return n == a ? b : a; }
  Sat balance_of(NodeId n) const { return n == a ? balance_a : balance_b; }
};

class ChannelGraph {
 public:
  ChannelGraph() = default;

  std::size_t node_count() const { return names_.size(); }
  /// Number of channel records, including closed ones.
  std::size_t channel_count() const { return channels_.size(); }
  std::size_t open_channel_count() const;

  const std::string& name(NodeId n) const;
  std::optional<NodeId> find_node(std::string_view name) const;
  /// Throws UnknownNode.
  NodeId node(std::string_view name) const;

  const FeePolicy& fee_policy(NodeId n) const;
  void set_fee_policy(NodeId n, FeePolicy policy);

  const Channel& channel(ChannelId c) const;
  std::span<const Channel> channels() const { return channels_; }

  /// Open channels incident to n, ordered by peer id.
  std::span<const ChannelId> incident(NodeId n) const;
  std::size_t degree(NodeId n) const { return incident(n).size(); }

  /// The channel record (open or closed) between two nodes, if any.
  std::optional<ChannelId> find_channel(NodeId x, NodeId y) const;

  Sat total_capacity() const;

  /// Moves amount from `from`'s side to its peer. Throws InsufficientBalance.
  void transfer(ChannelId c, NodeId from, Sat amount);
  /// Moves amount from `from`'s balance into the channel's in-flight pool.
  void lock(ChannelId c, NodeId from, Sat amount);
  /// Releases amount from the in-flight pool to `to`'s balance.
  void release(ChannelId c, NodeId to, Sat amount);

  void set_balances(ChannelId c, Sat balance_a, Sat balance_b);

  /// Opens a new channel, or reopens the closed record between the pair.
  ChannelId open_channel(NodeId a, NodeId b, Sat fund_a, Sat fund_b);
  /// Marks the channel closed; the caller pays out the final balances.
  void close_channel(ChannelId c);

 private:
  friend class GraphBuilder;

  static std::uint64_t pair_key(NodeId x, NodeId y);
  void rebuild_adjacency(NodeId n);
  Channel& mutable_channel(ChannelId c);

  std::vector<std::string> names_;
  std::vector<FeePolicy> fees_;
  std::vector<Channel> channels_;
  std::vector<std::vector<ChannelId>> adjacency_;
  std::unordered_map<std::string, NodeId> by_name_;
  std::unordered_map<std::uint64_t, ChannelId> by_pair_;
};

/// Collects nodes and channels by name, then produces a graph whose node ids
/// follow lexicographic name order. Parallel channels are merged by summing
/// capacity (and balances, when given).
class GraphBuilder {
 public:
  void add_node(std::string name, FeePolicy policy = {});
  void add_channel(std::string a, std::string b, Sat capacity);
  void add_channel(std::string a, std::string b, Sat capacity, Sat balance_a, Sat balance_b);

  /// Throws MalformedSnapshot or DanglingEndpoint.
  ChannelGraph build() &&;

 private:
  struct PendingChannel {
    std::string a;
    std::string b;
    Sat capacity;
    std::optional<std::pair<Sat, Sat>> balances;
  };
  std::vector<std::pair<std::string, FeePolicy>> nodes_;
  std::vector<PendingChannel> channels_;
};

/// Reads the snapshot JSON format (see README). Throws MalformedSnapshot or
/// DanglingEndpoint. Channels carry zero balances unless the snapshot gives
/// explicit `balance_a_sat`/`balance_b_sat`.
ChannelGraph load_graph(std::istream& in);
ChannelGraph load_graph_file(const std::string& path);

/// Writes the snapshot JSON format. Output is byte-deterministic.
void write_snapshot(const ChannelGraph& graph, std::ostream& out, bool include_balances = false);

struct SynthParams {
  Sat capacity_min = 20'000;
  Sat capacity_max = 16'777'215;
  Sat base_fee_max = 2;
  std::int64_t fee_rate_min_ppm = 1;
  std::int64_t fee_rate_max_ppm = 1'000;
};

/// Connected preferential-attachment topology. Deterministic in all inputs.
/// Throws InfeasibleShape when channel_count < node_count - 1 or the pair
/// count cannot hold channel_count distinct channels.
ChannelGraph generate_synthetic_graph(std::size_t node_count, std::size_t channel_count,
                                      std::uint64_t seed, const SynthParams& params = {});

/// Splits every channel's capacity 80/20 toward the endpoint with more open
/// channels; equal degrees split evenly with the odd satoshi going to the
/// lexicographically smaller endpoint.
ChannelGraph assign_deposits(ChannelGraph graph);

/// Free-function form of ChannelGraph::transfer.
void apply_transfer(ChannelGraph& graph, ChannelId c, NodeId from, Sat amount);

}  // namespace rapido
