#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rapido/hashlock.hpp"
#include "rapido/ledger.hpp"
#include "rapido/routing.hpp"
#include "rapido/topology.hpp"
#include "rapido/types.hpp"

namespace rapido {

struct DhtlcConfig {
  /// Timelock step between consecutive hops (one simulated day).
  SimTime hop_delta = 86'400;
  /// cash_ij = multiplier x the fee node j charges on its share.
  std::int64_t cash_multiplier = 10;
  /// A node that has not created its contract this long after its
  /// predecessor's counts as aborted.
  SimTime contract_deadline = 600;
  /// Honest protocol steps take a uniform delay in [1, max_step_delay].
  SimTime max_step_delay = 30;
};

using ContractId = std::uint64_t;
using PathId = std::uint64_t;

enum class ContractState { Open, Withdrawn, Refunded };

struct Contract {
  ContractId id = 0;
  PathId path = 0;
  std::size_t hop = 0;
  NodeId sender;
  NodeId receiver;
  ChannelId channel;
  Sat value = 0;  // the share
  Sat fee = 0;    // fees carried for the rest of the path
  HashLock hashlock;
  SimTime timelock = 0;
  SimTime created = 0;
  ContractState state = ContractState::Open;

  Sat locked() const { return value + fee; }
};

/// One share travelling along one route under one hash lock.
struct PathSession {
  PathId id = 0;
  Route route;
  Sat share = 0;
  std::vector<Sat> amounts;  // forwarded amount per hop
  HashLock hashlock;
  std::vector<SimTime> expiry;                       // per hop
  std::vector<std::optional<ContractId>> contracts;  // per hop
  std::vector<std::optional<std::uint64_t>> cash;    // per node index; intermediaries only

  NodeId customer() const { return route.source(); }
  NodeId merchant() const { return route.destination(); }
  /// Fee node index m (an intermediary) keeps: amounts[m-1] - amounts[m].
  Sat node_fee(std::size_t m) const { return amounts[m - 1] - amounts[m]; }
};

/// The contract operations over a graph and a ledger. Every operation
/// validates its preconditions and throws the matching Error otherwise.
class ContractEngine {
 public:
  ContractEngine(ChannelGraph& graph, Ledger& ledger, DhtlcConfig config = {});

  const DhtlcConfig& config() const { return config_; }
  const ChannelGraph& graph() const { return *graph_; }
  const Ledger& ledger() const { return *ledger_; }
  Ledger& ledger() { return *ledger_; }

  /// Registers a share on a route. Amounts come from the intermediaries' fee
  /// policies; expiries follow start + hop_delta x (L - j) for hop j.
  PathId begin_path(const Route& route, Sat share, const HashLock& lock, SimTime start);
  const PathSession& session(PathId p) const;
  std::span<const PathSession> sessions() const { return sessions_; }

  /// Locks cash from every intermediary of the path (see open_punish).
  bool lock_collateral(PathId p);

  /// Creates the contract for hop j of path p, locking amounts[j] in the
  /// sender's side of the channel. Throws OutOfSequence,
  /// TimelockNotDecreasing or InsufficientBalance.
  ContractId new_contract(PathId p, std::size_t hop, SimTime timelock);
  /// Throws AlreadyTerminal, Expired or BadPreimage.
  void withdraw(ContractId c, const Preimage& r);
  /// Throws AlreadyTerminal or NotYetExpired.
  void refund(ContractId c);
  /// Intermediary at node index m takes its cash back once its own contract
  /// exists. Throws ContractMissing or AlreadyTerminal.
  void get_back(PathId p, std::size_t m);
  /// Customer claims the cash of the intermediary at node index m, which
  /// failed to create its contract in time; downstream cash is returned.
  /// Throws NotAborted or AlreadyTerminal.
  void punish(PathId p, std::size_t m);

  const Contract& contract(ContractId c) const;
  std::span<const Contract> contracts() const { return contracts_; }

  bool settled(PathId p) const;

 private:
  Contract& mutable_contract(ContractId c);

  ChannelGraph* graph_;
  Ledger* ledger_;
  DhtlcConfig config_;
  std::vector<PathSession> sessions_;
  std::vector<Contract> contracts_;
};

enum class Strategy {
  Honest,
  /// Never creates its outgoing contract (as merchant: never claims).
  Abort,
  /// Claims its incoming contract only one second before it expires.
  Stall,
  /// Tries a wrong preimage before the right one.
  WrongPreimage,
  /// Leaves its cash locked until the payment is over.
  RefuseGetBack,
};

std::string to_string(Strategy s);

struct AdversaryPlan {
  std::unordered_map<NodeId, Strategy> strategies;

  Strategy of(NodeId n) const {
    const auto it = strategies.find(n);
    return it == strategies.end() ? Strategy::Honest : it->second;
  }
};

struct ExecutionOptions {
  DhtlcConfig config;
  std::uint64_t seed = 0;
  AdversaryPlan adversaries;
  /// Called after every protocol operation.
  std::function<void(const ContractEngine&)> observer;
};

struct PathOutcome {
  Route route;
  Sat share = 0;
  std::vector<Sat> amounts;
  bool settled = false;
  std::optional<NodeId> aborted_by;
  bool punished = false;
};

struct PaymentOutcome {
  bool success = false;
  Sat delivered = 0;
  Sat fees_paid = 0;
  std::vector<PathOutcome> paths;
  std::size_t on_chain_events = 0;
  std::size_t confirmation_waits = 0;
  SimTime started = 0;
  SimTime finished = 0;
  std::string failure;
  /// Punish attempts rejected because the accused node had in fact created
  /// its contract.
  std::size_t rejected_punishments = 0;
};

/// Forwarded amounts along a route when the destination receives `amount`.
std::vector<Sat> route_amounts(const ChannelGraph& graph, const Route& route, Sat amount);

/// Single-path hashed timelock payment. The merchant generates the preimage.
/// Throws RouteInfeasible when a hop cannot cover its amount up front.
PaymentOutcome htlc_execute(ChannelGraph& graph, Ledger& ledger, const Route& route, Sat amount,
                            const ExecutionOptions& options = {});

/// Multi-path payment: one hash lock per share, generated by the customer
/// and handed to the merchant privately; intermediaries post collateral
/// before contracts are chained. Paths settle or refund independently.
PaymentOutcome execute_payment(ChannelGraph& graph, Ledger& ledger, std::span<const Route> routes,
                               std::span<const Sat> shares, const ExecutionOptions& options = {});

}  // namespace rapido
