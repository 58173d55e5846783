#include "rapido/metrics.hpp"

#include <cmath>

#include "rapido/error.hpp"

namespace rapido {

Ratio node_skewness(Sat z_in, Sat z_out, Sat payment, Sat fee) {
  if (payment > z_out) throw Error(ErrorCode::PaymentExceedsOutbound, "payment exceeds outbound deposit");
  const Sat den = z_in + payment + fee;
  if (den <= 0) throw Error(ErrorCode::ZeroDeposit, "skewness undefined without inbound deposit");
  return {z_out - payment, den};
}

Ratio skewed_ratio(std::span<const SkewnessSample> samples, Ratio threshold) {
  if (samples.empty()) throw Error(ErrorCode::EmptySampleSet, "no skewness samples");
  std::map<NodeId, Ratio> worst;
  for (const auto& s : samples) {
    auto [it, inserted] = worst.emplace(s.node, s.value);
    if (!inserted && s.value < it->second) it->second = s.value;
  }
  std::int64_t skewed = 0;
  for (const auto& [node, value] : worst) {
    if (value < threshold) ++skewed;
  }
  return {skewed, static_cast<std::int64_t>(worst.size())};
}

Ratio success_rate(std::span<const PaymentOutcome> outcomes) {
  if (outcomes.empty()) throw Error(ErrorCode::EmptyOutcomeSet, "no payment outcomes");
  std::int64_t ok = 0;
  for (const auto& o : outcomes) {
    if (o.success) ++ok;
  }
  return {ok, static_cast<std::int64_t>(outcomes.size())};
}

void DirectionTracker::record(const Route& route) {
  for (std::size_t j = 1; j + 1 < route.hops.size(); ++j) {
    directions_[route.hops[j]].emplace(route.channels[j - 1], route.channels[j]);
  }
}

std::size_t DirectionTracker::involved_nodes() const { return directions_.size(); }

std::vector<SkewnessSample> DirectionTracker::sample(const ChannelGraph& graph) const {
  std::vector<SkewnessSample> out;
  for (const auto& [node, dirs] : directions_) {
    for (const auto& [in, out_channel] : dirs) {
      const Channel& ci = graph.channel(in);
      const Channel& co = graph.channel(out_channel);
      // A closed channel holds nothing for the node any more.
      const Sat z_in = ci.open ? ci.balance_of(node) : 0;
      const Sat z_out = co.open ? co.balance_of(node) : 0;
      if (z_in == 0) {
        // Nothing can come back in: the direction is unbounded, not skewed,
        // unless the outbound side is empty too, which leaves it undefined.
        continue;
      }
      out.push_back({node, in, out_channel, node_skewness(z_in, z_out, 0, 0)});
    }
  }
  return out;
}

Ratio DirectionTracker::skewed_ratio(const ChannelGraph& graph, Ratio threshold) const {
  if (directions_.empty()) throw Error(ErrorCode::EmptySampleSet, "no routed directions");
  const auto samples = sample(graph);
  std::int64_t skewed = 0;
  if (!samples.empty()) {
    const Ratio part = rapido::skewed_ratio(samples, threshold);
    skewed = part.num;
  }
  return {skewed, static_cast<std::int64_t>(directions_.size())};
}

FeeStats fee_stats(std::span<const Sat> fees) {
  FeeStats s;
  if (fees.empty()) return s;
  long double sum = 0;
  for (const Sat f : fees) sum += static_cast<long double>(f);
  const long double mean = sum / static_cast<long double>(fees.size());
  long double var = 0;
  for (const Sat f : fees) {
    const long double d = static_cast<long double>(f) - mean;
    var += d * d;
  }
  var /= static_cast<long double>(fees.size());
  s.mean = static_cast<double>(mean);
  s.stddev = static_cast<double>(std::sqrt(var));
  return s;
}

}  // namespace rapido
