#pragma once

#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "rapido/dhtlc.hpp"
#include "rapido/routing.hpp"
#include "rapido/topology.hpp"
#include "rapido/types.hpp"

namespace rapido {

/// Skewness of a node in the direction in -> out after forwarding `payment`
/// and earning `fee`: (z_out - payment) / (z_in + payment + fee).
/// Throws PaymentExceedsOutbound, or ZeroDeposit when the denominator is 0.
Ratio node_skewness(Sat z_in, Sat z_out, Sat payment, Sat fee);

struct SkewnessSample {
  NodeId node;
  ChannelId in;
  ChannelId out;
  Ratio value;
};

/// Share of nodes whose smallest sampled skewness is below threshold.
/// Each node counts once. Throws EmptySampleSet.
Ratio skewed_ratio(std::span<const SkewnessSample> samples, Ratio threshold = {1, 100});

/// Fully settled payments over attempts. Throws EmptyOutcomeSet.
Ratio success_rate(std::span<const PaymentOutcome> outcomes);

/// Remembers every (in-channel, out-channel) direction that payments were
/// routed through, per intermediary, and samples their current skewness.
class DirectionTracker {
 public:
  void record(const Route& route);

  std::size_t involved_nodes() const;
  /// One sample per recorded direction whose skewness is bounded, i.e. the
  /// node still holds something on the in-channel side.
  std::vector<SkewnessSample> sample(const ChannelGraph& graph) const;
  /// Seriously skewed share of every involved node. A node whose directions
  /// are all unbounded counts as involved but not skewed.
  /// Throws EmptySampleSet when nothing was recorded.
  Ratio skewed_ratio(const ChannelGraph& graph, Ratio threshold = {1, 100}) const;

 private:
  std::map<NodeId, std::set<std::pair<ChannelId, ChannelId>>> directions_;
};

struct FeeStats {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Population mean and standard deviation; zeros for an empty set.
FeeStats fee_stats(std::span<const Sat> fees);

}  // namespace rapido
