#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rapido/beacon.hpp"
#include "rapido/config.hpp"
#include "rapido/dhtlc.hpp"
#include "rapido/ledger.hpp"
#include "rapido/routing.hpp"
#include "rapido/topology.hpp"
#include "rapido/vdp.hpp"

namespace rapido {

struct NetworkSettings {
  std::size_t beacon_count = 200;
  SimTime beacon_period = 12 * 3600;
  std::uint64_t beacon_seed = 0;
  std::size_t max_candidates = 10;
  Ratio threshold{95, 100};
  ThresholdMode threshold_mode = ThresholdMode::Upper;
  VdpOptions vdp{64, 1e-6};
  double accept_probability = 1.0;
  std::vector<NodeId> always_refuse;
  int max_retries = 2;
  bool privacy_guard = true;
  LedgerConfig ledger;
  DhtlcConfig dhtlc;
};

NetworkSettings network_settings(const Config& config);

struct Attempt {
  bool success = false;
  std::string failure;
  Sat fee = 0;
  /// Routes that carried a positive share (or the single baseline route).
  std::vector<Route> routes;
  std::vector<Sat> shares;
  std::optional<VdpSolution> solution;
  PaymentOutcome outcome;
};

/// One system's view of the world: its own graph copy, ledger and routing
/// state, advanced payment by payment.
class PaymentNetwork {
 public:
  PaymentNetwork(ChannelGraph graph, NetworkSettings settings, std::uint64_t seed);

  ChannelGraph& graph() { return graph_; }
  const ChannelGraph& graph() const { return graph_; }
  Ledger& ledger() { return ledger_; }
  const Ledger& ledger() const { return ledger_; }
  const NetworkSettings& settings() const { return settings_; }

  /// Beacon epoch and routing tables current at time t.
  const RoutingTables& tables_at(SimTime t);
  const BeaconEpoch& epoch() const { return epoch_; }
  /// Forces a routing refresh, e.g. after channels were opened or closed.
  void invalidate_routes() { tables_valid_ = false; }

  /// Baseline: one fee-cheapest route, one hashed timelock chain.
  Attempt pay_ln(NodeId customer, NodeId merchant, Sat amount, SimTime at);
  /// Beacon candidates, probes, split, participation request, then one
  /// collateral-backed contract chain per share.
  Attempt pay_rapido(NodeId customer, NodeId merchant, Sat amount, Sat fee_budget, SimTime at);

 private:
  ChannelGraph graph_;
  NetworkSettings settings_;
  std::uint64_t seed_;
  Ledger ledger_;
  std::vector<Portion> portions_;
  BeaconEpoch epoch_;
  RoutingTables tables_;
  bool tables_valid_ = false;
  std::uint64_t nonce_ = 0;
};

}  // namespace rapido
