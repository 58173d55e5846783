#include "rapido/dhtlc.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

#include "rapido/error.hpp"
#include "rapido/rng.hpp"

namespace rapido {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Honest: return "honest";
    case Strategy::Abort: return "abort";
    case Strategy::Stall: return "stall";
    case Strategy::WrongPreimage: return "wrong_preimage";
    case Strategy::RefuseGetBack: return "refuse_get_back";
  }
  return "honest";
}

std::vector<Sat> route_amounts(const ChannelGraph& graph, const Route& route, Sat amount) {
  const std::size_t len = route.length();
  std::vector<Sat> amounts(len);
  if (len == 0) return amounts;
  amounts[len - 1] = amount;
  for (std::size_t j = len - 1; j-- > 0;) {
    amounts[j] = amounts[j + 1] + graph.fee_policy(route.hops[j + 1]).fee(amounts[j + 1]);
  }
  return amounts;
}

// ---------------------------------------------------------------------------
// Contract operations

ContractEngine::ContractEngine(ChannelGraph& graph, Ledger& ledger, DhtlcConfig config)
    : graph_(&graph), ledger_(&ledger), config_(config) {}

PathId ContractEngine::begin_path(const Route& route, Sat share, const HashLock& lock, SimTime start) {
  if (route.length() == 0 || route.hops.size() != route.length() + 1) {
    throw Error(ErrorCode::InvalidRoute, "route needs at least one hop");
  }
  if (share <= 0) throw Error(ErrorCode::InvalidRoute, "share must be positive");
  PathSession s;
  s.id = sessions_.size();
  s.route = route;
  s.share = share;
  s.amounts = route_amounts(*graph_, route, share);
  s.hashlock = lock;
  const std::size_t len = route.length();
  for (std::size_t j = 0; j < len; ++j) s.expiry.push_back(start + config_.hop_delta * static_cast<SimTime>(len - j));
  s.contracts.assign(len, std::nullopt);
  s.cash.assign(len + 1, std::nullopt);
  sessions_.push_back(std::move(s));
  return sessions_.back().id;
}

const PathSession& ContractEngine::session(PathId p) const {
  if (p >= sessions_.size()) throw Error(ErrorCode::ContractMissing, "unknown path");
  return sessions_[p];
}

bool ContractEngine::lock_collateral(PathId p) {
  PathSession& s = sessions_.at(p);
  std::vector<NodeId> nodes;
  std::vector<Sat> cash;
  for (std::size_t m = 1; m + 1 < s.route.hops.size(); ++m) {
    nodes.push_back(s.route.hops[m]);
    cash.push_back(config_.cash_multiplier * s.node_fee(m));
  }
  const auto locks = open_punish(*ledger_, nodes, cash);
  if (!locks) return false;
  for (std::size_t k = 0; k < locks->size(); ++k) s.cash[k + 1] = (*locks)[k];
  return true;
}

ContractId ContractEngine::new_contract(PathId p, std::size_t hop, SimTime timelock) {
  if (p >= sessions_.size()) throw Error(ErrorCode::ContractMissing, "unknown path");
  PathSession& s = sessions_[p];
  if (hop >= s.route.length()) throw Error(ErrorCode::OutOfSequence, "hop beyond the end of the path");
  if (s.contracts[hop]) throw Error(ErrorCode::OutOfSequence, "contract for this hop already exists");
  if (hop > 0) {
    const auto& prev = s.contracts[hop - 1];
    if (!prev || contracts_[*prev].state != ContractState::Open) {
      throw Error(ErrorCode::OutOfSequence, "previous hop has no open contract");
    }
    if (timelock >= contracts_[*prev].timelock) {
      throw Error(ErrorCode::TimelockNotDecreasing, "timelock must be below the previous hop's");
    }
  }
  Contract c;
  c.id = contracts_.size();
  c.path = p;
  c.hop = hop;
  c.sender = s.route.hops[hop];
  c.receiver = s.route.hops[hop + 1];
  c.channel = s.route.channels[hop];
  c.value = s.share;
  c.fee = s.amounts[hop] - s.share;
  c.hashlock = s.hashlock;
  c.timelock = timelock;
  c.created = ledger_->now();
  graph_->lock(c.channel, c.sender, c.locked());
  contracts_.push_back(c);
  s.contracts[hop] = c.id;
  ledger_->record({c.created, EventKind::ContractOpen, false, c.sender, c.receiver, c.channel, c.locked(), c.id});
  return c.id;
}

void ContractEngine::withdraw(ContractId id, const Preimage& r) {
  Contract& c = mutable_contract(id);
  if (c.state != ContractState::Open) throw Error(ErrorCode::AlreadyTerminal, "contract already settled");
  if (ledger_->now() >= c.timelock) throw Error(ErrorCode::Expired, "contract timelock has expired");
  if (!c.hashlock.unlocks(r)) throw Error(ErrorCode::BadPreimage, "preimage does not match the hash lock");
  graph_->release(c.channel, c.receiver, c.locked());
  c.state = ContractState::Withdrawn;
  ledger_->record({ledger_->now(), EventKind::ContractWithdraw, false, c.receiver, c.sender, c.channel, c.locked(), id});
}

void ContractEngine::refund(ContractId id) {
  Contract& c = mutable_contract(id);
  if (c.state != ContractState::Open) throw Error(ErrorCode::AlreadyTerminal, "contract already settled");
  if (ledger_->now() < c.timelock) throw Error(ErrorCode::NotYetExpired, "contract timelock has not expired");
  graph_->release(c.channel, c.sender, c.locked());
  c.state = ContractState::Refunded;
  ledger_->record({ledger_->now(), EventKind::ContractRefund, false, c.sender, c.receiver, c.channel, c.locked(), id});
}

void ContractEngine::get_back(PathId p, std::size_t m) {
  const PathSession& s = session(p);
  if (m >= s.cash.size() || !s.cash[m]) throw Error(ErrorCode::ContractMissing, "node has no collateral on this path");
  if (m >= s.contracts.size() || !s.contracts[m]) {
    throw Error(ErrorCode::ContractMissing, "node has not created its contract yet");
  }
  ledger_->return_cash(*s.cash[m]);
}

void ContractEngine::punish(PathId p, std::size_t m) {
  const PathSession& s = session(p);
  if (m >= s.cash.size() || !s.cash[m]) throw Error(ErrorCode::ContractMissing, "node has no collateral on this path");
  if (ledger_->cash(*s.cash[m]).state != CashState::Locked) {
    throw Error(ErrorCode::AlreadyTerminal, "collateral already settled");
  }
  if (s.contracts[m]) throw Error(ErrorCode::NotAborted, "node created its contract");
  const auto& prev = s.contracts[m - 1];
  if (!prev) throw Error(ErrorCode::NotAborted, "node was never handed a contract");
  if (ledger_->now() < contracts_[*prev].created + config_.contract_deadline) {
    throw Error(ErrorCode::NotAborted, "node is still within its deadline");
  }
  ledger_->forfeit_cash(*s.cash[m], s.customer());
  for (std::size_t k = m + 1; k < s.cash.size(); ++k) {
    if (s.cash[k] && ledger_->cash(*s.cash[k]).state == CashState::Locked) ledger_->return_cash(*s.cash[k]);
  }
}

const Contract& ContractEngine::contract(ContractId c) const {
  if (c >= contracts_.size()) throw Error(ErrorCode::ContractMissing, "unknown contract");
  return contracts_[c];
}

Contract& ContractEngine::mutable_contract(ContractId c) {
  if (c >= contracts_.size()) throw Error(ErrorCode::ContractMissing, "unknown contract");
  return contracts_[c];
}

bool ContractEngine::settled(PathId p) const {
  const PathSession& s = session(p);
  return s.contracts[0] && contracts_[*s.contracts[0]].state == ContractState::Withdrawn;
}

// ---------------------------------------------------------------------------
// Orchestration

namespace {

/// Drives the contract operations of one payment as a discrete-event run.
class Protocol {
 public:
  Protocol(ChannelGraph& graph, Ledger& ledger, const ExecutionOptions& options, bool collateral)
      : engine_(graph, ledger, options.config),
        options_(options),
        collateral_(collateral),
        rng_(mix64(options.seed, 0x6874'6c63ULL)) {}

  PaymentOutcome run(std::span<const Route> routes, std::span<const Sat> shares) {
    Ledger& ledger = engine_.ledger();
    PaymentOutcome out;
    out.started = ledger.now();
    const std::size_t chain_events = ledger.on_chain_event_count();
    const std::size_t chain_waits = ledger.confirmation_waits();

    for (std::size_t i = 0; i < routes.size(); ++i) {
      if (shares[i] <= 0) continue;
      // Whoever generates R (merchant for a plain payment, customer per share
      // otherwise), the merchant holds it when claiming; draws come from the
      // run's seeded stream so replays are exact.
      const Preimage r = random_preimage(rng_);
      const PathId p = engine_.begin_path(routes[i], shares[i], make_hashlock(r), ledger.now());
      preimages_.push_back(r);
      paths_.push_back(p);
    }

    if (collateral_) {
      for (std::size_t k = 0; k < paths_.size(); ++k) {
        if (engine_.lock_collateral(paths_[k])) {
          notify();
          continue;
        }
        for (std::size_t q = 0; q < k; ++q) release_collateral(paths_[q]);
        out.failure = "collateral unavailable";
        return finish(std::move(out), chain_events, chain_waits);
      }
    }

    for (std::size_t k = 0; k < paths_.size(); ++k) {
      schedule(ledger.now() + step_delay(), [this, k] { create(k, 0); });
    }
    while (!queue_.empty()) {
      auto [t, seq, slot] = queue_.top();
      queue_.pop();
      ledger.advance_to(t);
      auto fn = std::move(actions_[slot]);
      fn();
    }
    for (const auto& [k, m] : deferred_get_back_) {
      engine_.get_back(paths_[k], m);
      notify();
    }
    if (out.failure.empty()) {
      bool all = true;
      for (const PathId p : paths_) all = all && engine_.settled(p);
      if (!all) out.failure = "not every share settled";
    }
    return finish(std::move(out), chain_events, chain_waits);
  }

 private:
  using Action = std::function<void()>;

  void schedule(SimTime t, Action fn) {
    actions_.push_back(std::move(fn));
    queue_.emplace(t, seq_++, actions_.size() - 1);
  }

  SimTime step_delay() { return rng_.between(1, std::max<SimTime>(1, options_.config.max_step_delay)); }

  void notify() {
    if (options_.observer) options_.observer(engine_);
  }

  Strategy strategy(NodeId n) const { return options_.adversaries.of(n); }

  void release_collateral(PathId p) {
    const PathSession& s = engine_.session(p);
    for (const auto& c : s.cash) {
      if (c && engine_.ledger().cash(*c).state == CashState::Locked) engine_.ledger().return_cash(*c);
    }
    notify();
  }

  void create(std::size_t k, std::size_t hop) {
    const PathSession& s = engine_.session(paths_[k]);
    const NodeId sender = s.route.hops[hop];
    const std::size_t len = s.route.length();
    const bool intermediary = hop > 0;
    if (intermediary && strategy(sender) == Strategy::Abort) {
      abandon(k, hop);
      return;
    }
    try {
      engine_.new_contract(paths_[k], hop, s.expiry[hop]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientBalance) throw;
      abandon(k, hop);
      return;
    }
    notify();
    if (intermediary && s.cash[hop]) {
      if (strategy(sender) == Strategy::RefuseGetBack) {
        deferred_get_back_.emplace_back(k, hop);
        // The customer may still try to punish; the engine must refuse.
        const SimTime deadline = engine_.contract(*s.contracts[hop - 1]).created + options_.config.contract_deadline;
        schedule(deadline, [this, k, hop] { try_punish(k, hop); });
      } else {
        engine_.get_back(paths_[k], hop);
        notify();
      }
    }
    const SimTime now = engine_.ledger().now();
    if (hop + 1 < len) {
      schedule(now + step_delay(), [this, k, hop] { create(k, hop + 1); });
    } else {
      schedule(now + step_delay(), [this, k, len] { claim(k, len - 1, false); });
    }
  }

  /// Node at index `hop` never creates its contract: punish it after the
  /// deadline and let every created contract run to its refund.
  void abandon(std::size_t k, std::size_t hop) {
    const PathSession& s = engine_.session(paths_[k]);
    aborted_[k] = s.route.hops[hop];
    if (s.cash[hop]) {
      const SimTime deadline = engine_.contract(*s.contracts[hop - 1]).created + options_.config.contract_deadline;
      schedule(deadline, [this, k, hop] { try_punish(k, hop); });
    }
    schedule_refunds(k);
  }

  void try_punish(std::size_t k, std::size_t m) {
    try {
      engine_.punish(paths_[k], m);
      punished_[k] = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotAborted) throw;
      ++rejected_punishments_;
    }
    notify();
  }

  void schedule_refunds(std::size_t k) {
    const PathSession& s = engine_.session(paths_[k]);
    for (std::size_t j = 0; j < s.contracts.size(); ++j) {
      if (!s.contracts[j]) continue;
      const ContractId c = *s.contracts[j];
      schedule(s.expiry[j], [this, c] {
        if (engine_.contract(c).state != ContractState::Open) return;
        engine_.refund(c);
        notify();
      });
    }
  }

  /// Receiver of hop `hop` claims it with the preimage.
  void claim(std::size_t k, std::size_t hop, bool delayed) {
    const PathSession& s = engine_.session(paths_[k]);
    const NodeId receiver = s.route.hops[hop + 1];
    const bool is_merchant = hop + 1 == s.route.length();
    const Strategy st = strategy(receiver);
    if (is_merchant && st == Strategy::Abort) {
      aborted_[k] = receiver;
      schedule_refunds(k);
      return;
    }
    if (st == Strategy::Stall && !delayed) {
      const SimTime late = s.expiry[hop] - 1;
      if (late > engine_.ledger().now()) {
        schedule(late, [this, k, hop] { claim(k, hop, true); });
        return;
      }
    }
    const ContractId c = *s.contracts[hop];
    if (st == Strategy::WrongPreimage) {
      Preimage wrong = preimages_[k];
      wrong[0] ^= 0x5A;
      try {
        engine_.withdraw(c, wrong);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BadPreimage) throw;
      }
      notify();
    }
    engine_.withdraw(c, preimages_[k]);
    notify();
    if (hop > 0) {
      schedule(engine_.ledger().now() + step_delay(), [this, k, hop] { claim(k, hop - 1, false); });
    }
  }

  PaymentOutcome finish(PaymentOutcome out, std::size_t chain_events, std::size_t chain_waits) {
    const Ledger& ledger = engine_.ledger();
    bool all = !paths_.empty();
    for (std::size_t k = 0; k < paths_.size(); ++k) {
      const PathSession& s = engine_.session(paths_[k]);
      PathOutcome po;
      po.route = s.route;
      po.share = s.share;
      po.amounts = s.amounts;
      po.settled = engine_.settled(paths_[k]);
      if (const auto it = aborted_.find(k); it != aborted_.end()) po.aborted_by = it->second;
      po.punished = punished_.count(k) > 0;
      if (po.settled) {
        out.delivered += s.share;
        out.fees_paid += s.amounts.front() - s.share;
      }
      all = all && po.settled;
      out.paths.push_back(std::move(po));
    }
    out.success = all && out.failure.empty();
    out.on_chain_events = ledger.on_chain_event_count() - chain_events;
    out.confirmation_waits = ledger.confirmation_waits() - chain_waits;
    out.finished = ledger.now();
    out.rejected_punishments = rejected_punishments_;
    return out;
  }

  ContractEngine engine_;
  const ExecutionOptions& options_;
  bool collateral_;
  Rng rng_;
  std::vector<PathId> paths_;
  std::vector<Preimage> preimages_;
  std::vector<Action> actions_;
  std::priority_queue<std::tuple<SimTime, std::uint64_t, std::size_t>,
                      std::vector<std::tuple<SimTime, std::uint64_t, std::size_t>>, std::greater<>>
      queue_;
  std::uint64_t seq_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> deferred_get_back_;
  std::unordered_map<std::size_t, NodeId> aborted_;
  std::unordered_map<std::size_t, bool> punished_;
  std::size_t rejected_punishments_ = 0;
};

}  // namespace

PaymentOutcome htlc_execute(ChannelGraph& graph, Ledger& ledger, const Route& route, Sat amount,
                            const ExecutionOptions& options) {
  if (amount <= 0 || route.length() == 0) throw Error(ErrorCode::RouteInfeasible, "empty route or amount");
  const auto amounts = route_amounts(graph, route, amount);
  for (std::size_t j = 0; j < route.length(); ++j) {
    const Channel& c = graph.channel(route.channels[j]);
    if (!c.open || c.balance_of(route.hops[j]) < amounts[j]) {
      throw Error(ErrorCode::RouteInfeasible, "hop " + std::to_string(j) + " cannot carry " + std::to_string(amounts[j]));
    }
  }
  Protocol protocol(graph, ledger, options, false);
  const Route routes[] = {route};
  const Sat shares[] = {amount};
  return protocol.run(routes, shares);
}

PaymentOutcome execute_payment(ChannelGraph& graph, Ledger& ledger, std::span<const Route> routes,
                               std::span<const Sat> shares, const ExecutionOptions& options) {
  if (routes.size() != shares.size()) throw Error(ErrorCode::InvalidInstance, "routes and shares differ in length");
  std::optional<NodeId> customer;
  std::optional<NodeId> merchant;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    if (shares[i] <= 0) continue;
    if (routes[i].length() == 0) throw Error(ErrorCode::InvalidRoute, "route needs at least one hop");
    if (!customer) {
      customer = routes[i].source();
      merchant = routes[i].destination();
    } else if (*customer != routes[i].source() || *merchant != routes[i].destination()) {
      throw Error(ErrorCode::InvalidRoute, "routes disagree on customer or merchant");
    }
  }
  if (!customer) throw Error(ErrorCode::EmptySolution, "no positive share");
  Protocol protocol(graph, ledger, options, true);
  return protocol.run(routes, shares);
}

}  // namespace rapido
