#include "rapido/network.hpp"

#include <algorithm>

#include "rapido/error.hpp"
#include "rapido/rng.hpp"

namespace rapido {

NetworkSettings network_settings(const Config& config) {
  NetworkSettings s;
  const auto positive = [&](const char* key) {
    const auto v = config.get_int(key);
    if (v <= 0) throw Error(ErrorCode::BadConfig, std::string(key) + " must be positive");
    return v;
  };
  const auto nonnegative = [&](const char* key) {
    const auto v = config.get_int(key);
    if (v < 0) throw Error(ErrorCode::BadConfig, std::string(key) + " must be nonnegative");
    return v;
  };
  s.beacon_count = static_cast<std::size_t>(positive("beacon.count"));
  s.beacon_period = positive("beacon.period_hours") * 3600;
  s.beacon_seed = static_cast<std::uint64_t>(config.get_int("beacon.seed"));
  s.max_candidates = static_cast<std::size_t>(nonnegative("routing.max_candidates"));
  s.threshold = config.get_ratio("vdp.threshold");
  s.threshold_mode = parse_threshold_mode(config.get_string("vdp.threshold_mode"));
  s.vdp.node_budget = static_cast<std::size_t>(positive("vdp.node_budget"));
  s.vdp.relative_gap = config.get_double("vdp.relative_gap");
  s.accept_probability = config.get_double("vdp.accept_probability");
  s.max_retries = static_cast<int>(nonnegative("vdp.max_retries"));
  s.privacy_guard = config.get_int("vdp.privacy_guard") != 0;
  s.ledger.open_fee = nonnegative("ledger.open_fee");
  s.ledger.close_fee = nonnegative("ledger.close_fee");
  s.ledger.confirmation_delay = nonnegative("ledger.confirmation_delay");
  s.ledger.initial_on_chain = nonnegative("ledger.initial_on_chain");
  s.dhtlc.hop_delta = positive("dhtlc.hop_delta");
  s.dhtlc.cash_multiplier = nonnegative("dhtlc.cash_multiplier");
  s.dhtlc.contract_deadline = positive("dhtlc.contract_deadline");
  s.dhtlc.max_step_delay = positive("dhtlc.max_step_delay");
  if (s.dhtlc.max_step_delay >= s.dhtlc.contract_deadline) {
    throw Error(ErrorCode::BadConfig, "dhtlc.max_step_delay must be below dhtlc.contract_deadline");
  }
  return s;
}

PaymentNetwork::PaymentNetwork(ChannelGraph graph, NetworkSettings settings, std::uint64_t seed)
    : graph_(std::move(graph)),
      settings_(std::move(settings)),
      seed_(seed),
      ledger_(graph_.node_count(), settings_.ledger) {}

const RoutingTables& PaymentNetwork::tables_at(SimTime t) {
  const std::uint64_t beacon_seed = mix64(seed_, settings_.beacon_seed);
  if (portions_.empty()) portions_ = partition_topology(graph_, settings_.beacon_count, beacon_seed);
  const auto index = static_cast<std::uint64_t>(std::max<SimTime>(0, t) / settings_.beacon_period);
  if (!tables_valid_ || index != epoch_.epoch_index) {
    epoch_ = elect_beacons(portions_, index, beacon_seed, settings_.beacon_period);
    tables_ = proactive_update(graph_, epoch_);
    tables_valid_ = true;
  }
  return tables_;
}

Attempt PaymentNetwork::pay_ln(NodeId customer, NodeId merchant, Sat amount, SimTime at) {
  ledger_.advance_to(at);
  Attempt a;
  const std::uint64_t nonce = nonce_++;
  Route route;
  try {
    route = ln_route(graph_, customer, merchant, amount);
  } catch (const Error& e) {
    a.failure = to_string(e.code());
    return a;
  }
  ExecutionOptions exec;
  exec.config = settings_.dhtlc;
  exec.seed = mix64(seed_, nonce);
  a.outcome = htlc_execute(graph_, ledger_, route, amount, exec);
  a.routes.push_back(route);
  a.shares.push_back(amount);
  a.success = a.outcome.success;
  a.fee = a.outcome.fees_paid;
  if (!a.success) a.failure = a.outcome.failure;
  return a;
}

Attempt PaymentNetwork::pay_rapido(NodeId customer, NodeId merchant, Sat amount, Sat fee_budget, SimTime at) {
  ledger_.advance_to(at);
  Attempt a;
  const std::uint64_t nonce = nonce_++;
  std::vector<Route> candidates;
  try {
    candidates = candidate_paths(graph_, tables_at(ledger_.now()), customer, merchant, settings_.max_candidates);
  } catch (const Error& e) {
    a.failure = to_string(e.code());
    return a;
  }

  ParticipationPolicy policy;
  policy.accept_probability = settings_.accept_probability;
  policy.seed = seed_;
  policy.always_refuse = settings_.always_refuse;
  for (int round = 0; round <= settings_.max_retries; ++round) {
    if (candidates.empty()) {
      a.failure = to_string(ErrorCode::NoCandidatePath);
      return a;
    }
    std::vector<PathProbe> probes;
    probes.reserve(candidates.size());
    for (const auto& r : candidates) probes.push_back(reactive_probe(graph_, r));
    const VdpInstance inst =
        make_instance(graph_, probes, amount, fee_budget, settings_.threshold, settings_.threshold_mode);
    VdpSolution sol;
    try {
      sol = solve_vdp(inst, settings_.vdp);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoFeasibleSplit) throw;
      a.failure = to_string(e.code());
      return a;
    }
    if (settings_.privacy_guard) {
      auto guarded = guard_value_privacy(inst, sol.shares);
      if (guarded != sol.shares) sol.proven_optimal = false;
      sol.shares = std::move(guarded);
      sol.network_congestion = network_congestion(inst, sol.shares);
      sol.total_fees = check_split(inst, sol.shares).total_fees;
      sol.active_path_count = static_cast<std::size_t>(
          std::count_if(sol.shares.begin(), sol.shares.end(), [](Sat x) { return x > 0; }));
    }
    const auto answer = request_participation(candidates, sol.shares, policy, mix64(nonce, round));
    if (!answer.accepted) {
      // Drop every candidate that passes through a refusing node and split again.
      std::erase_if(candidates, [&](const Route& r) {
        return std::any_of(r.hops.begin() + 1, r.hops.end() - 1, [&](NodeId n) {
          return std::binary_search(answer.refusals.begin(), answer.refusals.end(), n);
        });
      });
      a.failure = "participation refused";
      continue;
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (sol.shares[i] <= 0) continue;
      a.routes.push_back(candidates[i]);
      a.shares.push_back(sol.shares[i]);
    }
    a.solution = std::move(sol);
    ExecutionOptions exec;
    exec.config = settings_.dhtlc;
    exec.seed = mix64(seed_, nonce);
    a.outcome = execute_payment(graph_, ledger_, a.routes, a.shares, exec);
    a.success = a.outcome.success;
    a.fee = a.outcome.fees_paid;
    a.failure = a.success ? std::string() : a.outcome.failure;
    return a;
  }
  return a;
}

}  // namespace rapido
