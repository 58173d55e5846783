#include "rapido/ledger.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

#include "rapido/error.hpp"

namespace rapido {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ChannelOpen: return "channel_open";
    case EventKind::ChannelClose: return "channel_close";
    case EventKind::CashLock: return "cash_lock";
    case EventKind::CashReturn: return "cash_return";
    case EventKind::CashForfeit: return "cash_forfeit";
    case EventKind::ContractOpen: return "contract_open";
    case EventKind::ContractWithdraw: return "contract_withdraw";
    case EventKind::ContractRefund: return "contract_refund";
  }
  return "unknown";
}

Ledger::Ledger(std::size_t node_count, LedgerConfig config)
    : config_(config), on_chain_(node_count, config.initial_on_chain) {}

void Ledger::advance_to(SimTime t) { now_ = std::max(now_, t); }

Sat Ledger::on_chain(NodeId n) const {
  if (n.value >= on_chain_.size()) throw Error(ErrorCode::UnknownNode, "node not in ledger");
  return on_chain_[n.value];
}

void Ledger::set_on_chain(NodeId n, Sat amount) {
  if (n.value >= on_chain_.size()) throw Error(ErrorCode::UnknownNode, "node not in ledger");
  on_chain_[n.value] = amount;
}

Sat Ledger::total(const ChannelGraph& graph) const {
  Sat sum = fee_sink_ + locked_cash_;
  for (const Sat s : on_chain_) sum += s;
  for (const auto& c : graph.channels()) {
    if (c.open) sum += c.capacity;
  }
  return sum;
}

ChannelId Ledger::open_channel(ChannelGraph& graph, NodeId a, NodeId b, Sat fund_a, Sat fund_b) {
  if (fund_a < 0 || fund_b < 0 || fund_a + fund_b <= 0) {
    throw Error(ErrorCode::InvalidChannel, "channel capacity must be positive");
  }
  if (on_chain(a) < fund_a + config_.open_fee || on_chain(b) < fund_b) {
    throw Error(ErrorCode::InsufficientOnChainFunds, "on-chain balance does not cover channel funding");
  }
  const ChannelId id = graph.open_channel(a, b, fund_a, fund_b);
  on_chain_[a.value] -= fund_a + config_.open_fee;
  on_chain_[b.value] -= fund_b;
  fee_sink_ += config_.open_fee;
  now_ += config_.confirmation_delay;
  ++confirmation_waits_;
  record({now_, EventKind::ChannelOpen, true, a, b, id, fund_a + fund_b, 0});
  return id;
}

void Ledger::close_channel(ChannelGraph& graph, ChannelId id) {
  const Channel& c = graph.channel(id);
  if (!c.open) throw Error(ErrorCode::InvalidChannel, "channel already closed");
  if (c.open_contracts > 0 || c.in_flight > 0) throw Error(ErrorCode::ChannelBusy, "channel has open contracts");
  const NodeId a = c.a;
  const NodeId b = c.b;
  const Sat capacity = c.capacity;
  on_chain_[a.value] += c.balance_a;
  on_chain_[b.value] += c.balance_b;
  graph.close_channel(id);
  const Sat fee_a = std::min(on_chain_[a.value], config_.close_fee - config_.close_fee / 2);
  const Sat fee_b = std::min(on_chain_[b.value], config_.close_fee / 2);
  on_chain_[a.value] -= fee_a;
  on_chain_[b.value] -= fee_b;
  fee_sink_ += fee_a + fee_b;
  now_ += config_.confirmation_delay;
  ++confirmation_waits_;
  record({now_, EventKind::ChannelClose, true, a, b, id, capacity, 0});
}

std::optional<std::uint64_t> Ledger::lock_cash(NodeId n, Sat amount) {
  if (amount < 0 || on_chain(n) < amount) return std::nullopt;
  const std::uint64_t id = cash_.size();
  cash_.push_back({id, n, amount, CashState::Locked});
  on_chain_[n.value] -= amount;
  locked_cash_ += amount;
  record({now_, EventKind::CashLock, false, n, NodeId{}, ChannelId{}, amount, id});
  return id;
}

void Ledger::return_cash(std::uint64_t id) {
  if (id >= cash_.size()) throw Error(ErrorCode::ContractMissing, "unknown cash lock");
  CashLock& lock = cash_[id];
  if (lock.state != CashState::Locked) throw Error(ErrorCode::AlreadyTerminal, "cash lock already settled");
  lock.state = CashState::Returned;
  locked_cash_ -= lock.amount;
  on_chain_[lock.node.value] += lock.amount;
  record({now_, EventKind::CashReturn, false, lock.node, NodeId{}, ChannelId{}, lock.amount, id});
}

void Ledger::forfeit_cash(std::uint64_t id, NodeId beneficiary) {
  if (id >= cash_.size()) throw Error(ErrorCode::ContractMissing, "unknown cash lock");
  CashLock& lock = cash_[id];
  if (lock.state != CashState::Locked) throw Error(ErrorCode::AlreadyTerminal, "cash lock already settled");
  (void)on_chain(beneficiary);
  lock.state = CashState::Forfeited;
  locked_cash_ -= lock.amount;
  on_chain_[beneficiary.value] += lock.amount;
  // A forfeit is settled on chain, unlike the off-chain lock bookkeeping.
  ++confirmation_waits_;
  record({now_, EventKind::CashForfeit, true, lock.node, beneficiary, ChannelId{}, lock.amount, id});
}

const CashLock& Ledger::cash(std::uint64_t id) const {
  if (id >= cash_.size()) throw Error(ErrorCode::ContractMissing, "unknown cash lock");
  return cash_[id];
}

void Ledger::record(LedgerEvent event) { events_.push_back(event); }

std::size_t Ledger::on_chain_event_count() const {
  return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), [](const LedgerEvent& e) { return e.on_chain; }));
}

void Ledger::write_events(const ChannelGraph& graph, std::ostream& out) const {
  for (const auto& e : events_) {
    nlohmann::json j;
    j["time"] = e.time;
    j["kind"] = to_string(e.kind);
    j["on_chain"] = e.on_chain;
    if (e.node.valid()) j["node"] = graph.name(e.node);
    if (e.peer.valid()) j["peer"] = graph.name(e.peer);
    if (e.channel.valid()) j["channel"] = e.channel.value;
    j["amount_sat"] = e.amount;
    j["ref"] = e.ref;
    out << j.dump() << '\n';
  }
}

std::optional<std::vector<std::uint64_t>> open_punish(Ledger& ledger, std::span<const NodeId> nodes,
                                                      std::span<const Sat> cash) {
  if (nodes.size() != cash.size()) throw Error(ErrorCode::InvalidInstance, "node and cash lists differ in length");
  std::vector<std::uint64_t> locks;
  locks.reserve(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto id = ledger.lock_cash(nodes[k], cash[k]);
    if (!id) {
      for (const auto taken : locks) ledger.return_cash(taken);
      return std::nullopt;
    }
    locks.push_back(*id);
  }
  return locks;
}

}  // namespace rapido
