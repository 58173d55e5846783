#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rapido/routing.hpp"
#include "rapido/topology.hpp"
#include "rapido/types.hpp"

namespace rapido {

/// One hop of a candidate path as the split solver sees it.
/// link identifies the directed channel; hops on different paths with the
/// same link draw on the same deposit. forwarder_fee is the policy of the
/// hop's receiver, charged when it forwards onward (ignored on the last hop).
struct VdpHop {
  std::uint64_t link = 0;
  Sat deposit = 0;
  FeePolicy forwarder_fee;
};

struct VdpPath {
  std::vector<VdpHop> hops;
};

enum class ThresholdMode { Upper, Lower, Off };

struct VdpInstance {
  Sat payment_value = 0;
  std::vector<VdpPath> paths;
  Sat fee_budget = 0;
  Ratio threshold{95, 100};
  ThresholdMode threshold_mode = ThresholdMode::Upper;
};

struct VdpSolution {
  std::vector<Sat> shares;  // aligned with VdpInstance::paths
  Ratio network_congestion;
  Sat total_fees = 0;
  std::size_t active_path_count = 0;
  /// True when branch-and-bound finished without hitting its node budget.
  bool proven_optimal = false;
  /// Relaxation value at the root, a lower bound on any integer split.
  double lower_bound = 0.0;
  std::size_t nodes_explored = 0;
};

struct VdpOptions {
  std::size_t node_budget = 4000;
  /// Stop improving once the incumbent is within this relative distance of
  /// the best bound. Zero asks for an exact optimum.
  double relative_gap = 0.0;
};

/// Directed-link key for channel c traversed from its `a` side (0) or `b` side (1).
constexpr std::uint64_t link_key(ChannelId c, bool from_a) { return std::uint64_t{c.value} * 2 + (from_a ? 0 : 1); }

VdpPath to_vdp_path(const ChannelGraph& graph, const PathProbe& probe);
VdpInstance make_instance(const ChannelGraph& graph, const std::vector<PathProbe>& probes, Sat payment_value,
                          Sat fee_budget, Ratio threshold, ThresholdMode mode);

/// share / deposit, exact. Throws ZeroDeposit.
Ratio channel_congestion(Sat share, Sat deposit);

/// Largest share load over deposit across every link used by a path with a
/// positive share. Loads of paths that share a link add up.
/// Throws EmptySolution when every share is zero.
Ratio network_congestion(const VdpInstance& instance, std::span<const Sat> shares);

/// Amount each hop carries when the merchant is to receive `share`:
/// the share plus every fee charged downstream of that hop. A zero share
/// carries nothing.
std::vector<Sat> forwarded_amounts(const VdpPath& path, Sat share);
/// Fees the customer pays on top of `share`; the endpoints charge nothing.
Sat path_fee(const VdpPath& path, Sat share);
Sat path_fee(const PathProbe& probe, Sat share);

/// Why a concrete split is or is not acceptable.
struct SplitCheck {
  bool feasible = false;
  std::string violation;
  Sat total_fees = 0;
};

/// Checks a split against every hard rule: sum, per-link deposit strictness
/// (forwarded amounts < deposit), fee budget, and the threshold rule.
SplitCheck check_split(const VdpInstance& instance, std::span<const Sat> shares);

/// Minimum-congestion integer split. Solves the relaxation with a dense
/// simplex and closes the integrality gap by branch-and-bound over the
/// integer shares and path activations. Throws InvalidInstance or
/// NoFeasibleSplit.
VdpSolution solve_vdp(const VdpInstance& instance, const VdpOptions& options = {});

/// When a split uses two or more paths but one path's first hop would carry
/// the whole payment value or more (its share plus fees), trims that share
/// until the first hop stays below the value and moves the surplus to the
/// other path that keeps congestion lowest. Returns the shares unchanged if
/// nothing needs repair or no repair passes check_split.
std::vector<Sat> guard_value_privacy(const VdpInstance& instance, std::span<const Sat> shares);

struct ParticipationPolicy {
  double accept_probability = 1.0;
  std::uint64_t seed = 0;
  std::vector<NodeId> always_refuse;
};

struct ParticipationResult {
  bool accepted = true;
  std::vector<NodeId> refusals;
};

/// Asks every intermediary on the routes with a positive share. Each answer
/// is a deterministic function of (seed, nonce, node).
ParticipationResult request_participation(std::span<const Route> routes, std::span<const Sat> shares,
                                          const ParticipationPolicy& policy, std::uint64_t nonce);

/// JSON form used by the `split` command.
VdpInstance read_instance(std::istream& in);
void write_instance(const VdpInstance& instance, std::ostream& out);
void write_solution(const VdpInstance& instance, const VdpSolution& solution, std::ostream& out);

ThresholdMode parse_threshold_mode(const std::string& text);
std::string to_string(ThresholdMode mode);
/// Parses a decimal such as "0.95" into an exact ratio.
Ratio parse_decimal_ratio(const std::string& text);

}  // namespace rapido
