#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rapido/topology.hpp"
#include "rapido/types.hpp"

namespace rapido {

struct LedgerConfig {
  Sat open_fee = 1'000;
  Sat close_fee = 1'000;
  /// Simulated seconds an on-chain transaction waits for confirmation.
  SimTime confirmation_delay = 660;
  Sat initial_on_chain = 1'000'000;
};

enum class EventKind {
  ChannelOpen,
  ChannelClose,
  CashLock,
  CashReturn,
  CashForfeit,
  ContractOpen,
  ContractWithdraw,
  ContractRefund,
};

std::string to_string(EventKind kind);

struct LedgerEvent {
  SimTime time = 0;
  EventKind kind = EventKind::ChannelOpen;
  /// Whether the event needs a blockchain transaction.
  bool on_chain = false;
  NodeId node;
  NodeId peer;
  ChannelId channel;
  Sat amount = 0;
  std::uint64_t ref = 0;  // contract or cash-lock id where relevant
};

enum class CashState { Locked, Returned, Forfeited };

struct CashLock {
  std::uint64_t id = 0;
  NodeId node;
  Sat amount = 0;
  CashState state = CashState::Locked;
};

/// Simulated blockchain: on-chain balances, a sink for on-chain fees,
/// collateral locks, the event log and the clock.
///
/// Conservation: total(graph) = on-chain balances + fee sink + locked cash
/// + capacity of open channels, and no operation changes it.
class Ledger {
 public:
  Ledger(std::size_t node_count, LedgerConfig config = {});

  const LedgerConfig& config() const { return config_; }

  SimTime now() const { return now_; }
  /// Moves the clock forward; earlier times are ignored.
  void advance_to(SimTime t);

  Sat on_chain(NodeId n) const;
  void set_on_chain(NodeId n, Sat amount);
  Sat fee_sink() const { return fee_sink_; }
  Sat locked_cash() const { return locked_cash_; }
  Sat total(const ChannelGraph& graph) const;

  /// Funds a channel from both parties' on-chain balances; the opener `a`
  /// also pays the open fee. Waits one confirmation delay.
  /// Throws InsufficientOnChainFunds or InvalidChannel.
  ChannelId open_channel(ChannelGraph& graph, NodeId a, NodeId b, Sat fund_a, Sat fund_b);
  /// Pays both balances back on-chain; the fee is split evenly (the odd
  /// satoshi from a). Waits one confirmation delay. Throws ChannelBusy.
  void close_channel(ChannelGraph& graph, ChannelId c);

  /// Moves amount from n's on-chain balance into a collateral lock. Returns
  /// nothing if n cannot cover it.
  std::optional<std::uint64_t> lock_cash(NodeId n, Sat amount);
  /// Throws AlreadyTerminal.
  void return_cash(std::uint64_t id);
  void forfeit_cash(std::uint64_t id, NodeId beneficiary);
  const CashLock& cash(std::uint64_t id) const;

  void record(LedgerEvent event);
  std::span<const LedgerEvent> events() const { return events_; }
  std::size_t on_chain_event_count() const;
  /// Confirmation waits incurred so far (one per on-chain transaction).
  std::size_t confirmation_waits() const { return confirmation_waits_; }

  /// Event log as JSON lines.
  void write_events(const ChannelGraph& graph, std::ostream& out) const;

 private:
  LedgerConfig config_;
  SimTime now_ = 0;
  std::vector<Sat> on_chain_;
  Sat fee_sink_ = 0;
  Sat locked_cash_ = 0;
  std::vector<CashLock> cash_;
  std::vector<LedgerEvent> events_;
  std::size_t confirmation_waits_ = 0;
};

/// Locks cash[k] from nodes[k] for every k. Either every lock is taken and
/// their ids returned, or every partial lock is rolled back and nothing is
/// returned. An empty list succeeds vacuously.
std::optional<std::vector<std::uint64_t>> open_punish(Ledger& ledger, std::span<const NodeId> nodes,
                                                      std::span<const Sat> cash);

}  // namespace rapido
