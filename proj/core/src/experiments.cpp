#include "rapido/experiments.hpp"

#include <algorithm>
#include <stdexcept>

#include "rapido/beacon.hpp"
#include "rapido/error.hpp"
#include "rapido/metrics.hpp"
#include "rapido/rng.hpp"
#include "rapido/routing.hpp"

namespace rapido {

namespace {

std::vector<Sat> to_sats(const std::vector<std::int64_t>& v, const char* key) {
  for (const auto x : v) {
    if (x <= 0) throw Error(ErrorCode::BadConfig, std::string(key) + " entries must be positive");
  }
  return v;
}

std::size_t to_size(std::int64_t v, const char* key) {
  if (v < 0) throw Error(ErrorCode::BadConfig, std::string(key) + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

Sat outbound(const ChannelGraph& g, NodeId n) {
  Sat total = 0;
  for (const ChannelId c : g.incident(n)) total += g.channel(c).balance_of(n);
  return total;
}

bool can_pay_directly(const ChannelGraph& g, NodeId c, NodeId m, Sat amount) {
  const auto ch = g.find_channel(c, m);
  return ch && g.channel(*ch).balance_of(c) >= amount;
}

void check_conservation(const PaymentNetwork& net, Sat expected) {
  if (net.ledger().total(net.graph()) != expected) throw std::logic_error("ledger conservation violated");
}

std::vector<NodeId> all_nodes(const ChannelGraph& g) {
  std::vector<NodeId> v(g.node_count());
  for (std::uint32_t i = 0; i < v.size(); ++i) v[i] = NodeId{i};
  return v;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

struct Cell {
  std::vector<std::uint8_t> success;
  std::vector<Sat> fees;
  DirectionTracker tracker;

  void add(const Attempt& a) {
    success.push_back(a.success ? 1 : 0);
    if (a.success) fees.push_back(a.fee);
    for (const auto& r : a.routes) tracker.record(r);
  }

  MetricRow row(const ChannelGraph& g) const {
    MetricRow r;
    const auto ok = std::count(success.begin(), success.end(), std::uint8_t{1});
    r.success_rate = {static_cast<std::int64_t>(ok), std::max<std::int64_t>(1, static_cast<std::int64_t>(success.size()))};
    const FeeStats fs = fee_stats(fees);
    r.avg_fee = fs.mean;
    r.fee_stddev = fs.stddev;
    if (tracker.involved_nodes() > 0) r.skewed_ratio = tracker.skewed_ratio(g);
    return r;
  }
};

void observe_privacy(const Attempt& a, Sat amount, PrivacyStats& stats) {
  if (!a.success || a.outcome.paths.size() < 2) return;
  ++stats.multipath_payments;
  bool exposed = false;
  for (const auto& p : a.outcome.paths) {
    if (p.route.length() < 2 || p.amounts.empty()) continue;
    const Ratio seen{p.amounts.front(), amount};
    if (seen > stats.worst) stats.worst = seen;
    if (p.amounts.front() >= amount) exposed = true;
  }
  if (exposed) ++stats.exposed_payments;
}

struct SystemSpec {
  std::string name;
  bool rapido;
  const std::vector<Sat>* fees;
};

}  // namespace

ExperimentConfig experiment_config(const Config& config) {
  ExperimentConfig e;
  e.graph.snapshot = config.get_string("graph.snapshot");
  e.graph.nodes = to_size(config.get_int("graph.nodes"), "graph.nodes");
  e.graph.channels = to_size(config.get_int("graph.channels"), "graph.channels");
  e.graph.params.capacity_min = config.get_int("graph.capacity_min");
  e.graph.params.capacity_max = config.get_int("graph.capacity_max");
  e.graph.params.base_fee_max = config.get_int("graph.base_fee_max");
  e.graph.params.fee_rate_min_ppm = config.get_int("graph.fee_rate_min_ppm");
  e.graph.params.fee_rate_max_ppm = config.get_int("graph.fee_rate_max_ppm");
  const auto& p = e.graph.params;
  if (p.capacity_min <= 0 || p.capacity_max < p.capacity_min || p.base_fee_max < 0 || p.fee_rate_min_ppm < 0 ||
      p.fee_rate_max_ppm < p.fee_rate_min_ppm) {
    throw Error(ErrorCode::BadConfig, "synthetic graph parameters out of range");
  }

  e.seeds.clear();
  for (const auto s : config.get_int_list("experiment.seeds")) e.seeds.push_back(static_cast<std::uint64_t>(s));
  e.buckets = to_sats(config.get_int_list("experiment.buckets"), "experiment.buckets");
  e.adaptive_fees = config.get_int_list("experiment.adaptive_fees");
  e.fixed_fees = config.get_int_list("experiment.fixed_fees");
  for (const auto* table : {&e.adaptive_fees, &e.fixed_fees}) {
    if (table->size() != e.buckets.size()) {
      throw Error(ErrorCode::ConfigMismatch, "fee restriction table does not align with experiment.buckets");
    }
    for (const Sat f : *table) {
      if (f < 0) throw Error(ErrorCode::BadConfig, "fee restrictions must be nonnegative");
    }
  }
  e.attempts = to_size(config.get_int("experiment.attempts"), "experiment.attempts");
  e.interarrival = config.get_int("experiment.interarrival");
  if (e.interarrival <= 0) throw Error(ErrorCode::BadConfig, "experiment.interarrival must be positive");
  e.exclude_direct = config.get_double("experiment.exclude_direct");
  if (e.exclude_direct < 0.0 || e.exclude_direct > 1.0) {
    throw Error(ErrorCode::BadConfig, "experiment.exclude_direct must lie in [0, 1]");
  }
  e.pair_count = to_size(config.get_int("experiment.pairs"), "experiment.pairs");
  e.round_count = to_size(config.get_int("experiment.rounds"), "experiment.rounds");
  e.hub_degree = to_size(config.get_int("experiment.hub_degree"), "experiment.hub_degree");
  e.s2_fee_policy = config.get_string("experiment.s2_fee_policy");
  e.beacon_counts.clear();
  for (const auto h : config.get_int_list("experiment.beacon_counts")) {
    if (h <= 0) throw Error(ErrorCode::BadConfig, "experiment.beacon_counts entries must be positive");
    e.beacon_counts.push_back(static_cast<std::size_t>(h));
  }
  e.hop_pairs = to_size(config.get_int("experiment.hop_pairs"), "experiment.hop_pairs");
  e.fee_budget_policy = config.get_string("vdp.fee_budget_policy");
  e.fee_budget = config.get_int("vdp.fee_budget");
  for (const auto* policy : {&e.fee_budget_policy, &e.s2_fee_policy}) {
    if (*policy != "fixed" && *policy != "adaptive") {
      throw Error(ErrorCode::BadConfig, "fee budget policy must be fixed or adaptive");
    }
  }
  if (e.fee_budget < 0) throw Error(ErrorCode::BadConfig, "vdp.fee_budget must be nonnegative");
  e.naive_customer = config.get_string("experiment.naive_customer");
  e.naive_merchant = config.get_string("experiment.naive_merchant");
  e.naive_amount = config.get_int("experiment.naive_amount");
  if (e.naive_amount <= 0) throw Error(ErrorCode::BadConfig, "experiment.naive_amount must be positive");
  e.network = network_settings(config);
  return e;
}

Sat restriction_for(const std::vector<Sat>& buckets, const std::vector<Sat>& fees, Sat amount) {
  if (buckets.empty() || buckets.size() != fees.size()) {
    throw Error(ErrorCode::ConfigMismatch, "fee restriction table does not align with buckets");
  }
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    if (amount <= buckets[i]) return fees[i];
  }
  return fees.back();
}

Sat fee_budget_for(const ExperimentConfig& config, Sat amount) {
  if (config.fee_budget_policy == "adaptive") return restriction_for(config.buckets, config.adaptive_fees, amount);
  return config.fee_budget;
}

ChannelGraph build_graph(const GraphSource& source, std::uint64_t seed) {
  if (source.snapshot.empty()) {
    return assign_deposits(generate_synthetic_graph(source.nodes, source.channels, seed, source.params));
  }
  ChannelGraph g = load_graph_file(source.snapshot);
  const auto channels = g.channels();
  const bool funded = std::all_of(channels.begin(), channels.end(), [](const Channel& c) {
    return c.balance_a + c.balance_b + c.in_flight == c.capacity;
  });
  return funded ? g : assign_deposits(std::move(g));
}

std::vector<HopsRow> run_hops_experiment(const ChannelGraph& graph, const std::vector<std::size_t>& beacon_counts,
                                         std::size_t pair_count, std::uint64_t seed) {
  std::vector<HopsRow> rows;
  if (graph.node_count() < 2) return rows;
  Rng rng(mix64(seed, fnv1a64("hops")));
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::size_t distance_sum = 0;
  const std::size_t max_tries = pair_count * 50 + 100;
  for (std::size_t t = 0; t < max_tries && pairs.size() < pair_count; ++t) {
    const NodeId c{static_cast<std::uint32_t>(rng.below(graph.node_count()))};
    const NodeId m{static_cast<std::uint32_t>(rng.below(graph.node_count()))};
    if (c == m) continue;
    const auto d = hop_distance(graph, c, m);
    if (!d) continue;
    pairs.emplace_back(c, m);
    distance_sum += *d;
  }
  const double baseline = pairs.empty() ? 0.0 : static_cast<double>(distance_sum) / static_cast<double>(pairs.size());

  for (const std::size_t h : beacon_counts) {
    const std::uint64_t beacon_seed = mix64(seed, h);
    const auto portions = partition_topology(graph, h, beacon_seed);
    const BeaconEpoch epoch = elect_beacons(portions, 0, beacon_seed);
    const RoutingTables tables = proactive_update(graph, epoch);
    HopsRow row;
    row.seed = seed;
    row.beacon_count = h;
    row.baseline_avg_hops = baseline;
    row.pairs = pairs.size();
    std::size_t route_hops = 0;
    std::size_t candidate_hops = 0;
    for (const auto& [c, m] : pairs) {
      const auto routes = beacon_routes(tables, c, m);
      std::vector<std::vector<NodeId>> distinct;
      for (const auto& [k, nodes] : routes) {
        route_hops += nodes.size() - 1;
        if (std::find(distinct.begin(), distinct.end(), nodes) == distinct.end()) distinct.push_back(nodes);
      }
      for (const auto& nodes : distinct) candidate_hops += nodes.size() - 1;
      row.routes += routes.size();
      row.candidates += distinct.size();
    }
    const auto mean = [](std::size_t sum, std::size_t n) {
      return n == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(n);
    };
    row.avg_hops = mean(route_hops, row.routes);
    row.candidate_avg_hops = mean(candidate_hops, row.candidates);
    rows.push_back(row);
  }
  return rows;
}

ExperimentReport run_hops(const ExperimentConfig& config) {
  ExperimentReport report;
  report.scenario = "hops";
  for (const auto seed : config.seeds) {
    const ChannelGraph g = build_graph(config.graph, seed);
    auto rows = run_hops_experiment(g, config.beacon_counts, config.hop_pairs, seed);
    report.hops.insert(report.hops.end(), rows.begin(), rows.end());
  }
  return report;
}

ExperimentReport run_scenario1(const ExperimentConfig& config) {
  ExperimentReport report;
  report.scenario = "s1";
  if (config.adaptive_fees.size() != config.buckets.size() || config.fixed_fees.size() != config.buckets.size()) {
    throw Error(ErrorCode::ConfigMismatch, "fee restriction table does not align with buckets");
  }
  if (config.attempts == 0) return report;
  const std::vector<SystemSpec> systems{
      {"ln", false, nullptr},
      {"rapido_fixed", true, &config.fixed_fees},
      {"rapido_adaptive", true, &config.adaptive_fees},
  };
  for (const auto seed : config.seeds) {
    const ChannelGraph base = build_graph(config.graph, seed);
    const auto nodes = all_nodes(base);
    for (std::size_t b = 0; b < config.buckets.size(); ++b) {
      const Sat amount = config.buckets[b];
      std::vector<NodeId> customers;
      for (const NodeId n : nodes) {
        if (outbound(base, n) >= amount) customers.push_back(n);
      }
      if (customers.empty() || nodes.size() < 2) {
        throw Error(ErrorCode::ConfigMismatch, "no customer holds enough deposits for bucket " + std::to_string(amount));
      }
      // The same pair sequence is replayed against every system.
      Rng rng(mix64(seed, fnv1a64("s1"), b));
      std::vector<std::pair<NodeId, NodeId>> pairs;
      while (pairs.size() < config.attempts) {
        const NodeId c = customers[rng.below(customers.size())];
        NodeId m = nodes[rng.below(nodes.size() - 1)];
        if (m >= c) m = NodeId{m.value + 1};
        if (config.exclude_direct > 0.0 && can_pay_directly(base, c, m, amount) &&
            rng.bernoulli(config.exclude_direct)) {
          continue;
        }
        pairs.emplace_back(c, m);
      }

      for (const auto& sys : systems) {
        PaymentNetwork net(base, config.network, seed);
        const Sat expected = net.ledger().total(net.graph());
        const Sat restriction = sys.fees ? (*sys.fees)[b] : 0;
        Cell cell;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
          const SimTime at = static_cast<SimTime>(k) * config.interarrival;
          const auto [c, m] = pairs[k];
          const Attempt a = sys.rapido ? net.pay_rapido(c, m, amount, restriction, at) : net.pay_ln(c, m, amount, at);
          cell.add(a);
          if (sys.rapido) observe_privacy(a, amount, report.privacy);
        }
        check_conservation(net, expected);
        MetricRow row = cell.row(net.graph());
        row.scenario = "s1";
        row.system = sys.name;
        row.payment_value = amount;
        row.fee_restriction = restriction;
        row.seed = seed;
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

ExperimentReport run_scenario2(const ExperimentConfig& config) {
  ExperimentReport report;
  report.scenario = "s2";
  const bool adaptive = config.s2_fee_policy == "adaptive";
  const std::vector<Sat>& table = adaptive ? config.adaptive_fees : config.fixed_fees;
  if (table.size() != config.buckets.size()) {
    throw Error(ErrorCode::ConfigMismatch, "fee restriction table does not align with buckets");
  }
  const std::vector<SystemSpec> systems{
      {"ln", false, nullptr},
      {adaptive ? "rapido_adaptive" : "rapido_fixed", true, &table},
  };
  for (const auto seed : config.seeds) {
    const ChannelGraph base = build_graph(config.graph, seed);
    std::vector<NodeId> pool;
    for (const NodeId n : all_nodes(base)) {
      if (base.degree(n) >= config.hub_degree) pool.push_back(n);
    }
    if (pool.size() < 2 * config.pair_count) {
      // Not enough hubs: fall back to the best connected nodes.
      pool = all_nodes(base);
      std::stable_sort(pool.begin(), pool.end(),
                       [&](NodeId x, NodeId y) { return base.degree(x) > base.degree(y); });
      pool.resize(std::min(pool.size(), 2 * config.pair_count));
    }
    Rng rng(mix64(seed, fnv1a64("s2")));
    shuffle(pool, rng);
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (std::size_t i = 0; i + 1 < pool.size() && pairs.size() < config.pair_count; i += 2) {
      pairs.emplace_back(pool[i], pool[i + 1]);
    }

    for (const auto& sys : systems) {
      PaymentNetwork net(base, config.network, seed);
      const Sat expected = net.ledger().total(net.graph());
      DirectionTracker tracker;
      for (std::size_t r = 0; r < config.round_count; ++r) {
        Cell cell;
        std::size_t k = 0;
        for (const auto& [c, m] : pairs) {
          for (std::size_t b = 0; b < config.buckets.size(); ++b, ++k) {
            const SimTime at = static_cast<SimTime>(r) * config.network.beacon_period +
                               static_cast<SimTime>(k) * config.interarrival;
            const Sat amount = config.buckets[b];
            const Attempt a = sys.rapido ? net.pay_rapido(c, m, amount, (*sys.fees)[b], at)
                                         : net.pay_ln(c, m, amount, at);
            cell.add(a);
            for (const auto& route : a.routes) tracker.record(route);
          }
        }
        MetricRow row = cell.row(net.graph());
        row.skewed_ratio.reset();
        if (tracker.involved_nodes() > 0) row.skewed_ratio = tracker.skewed_ratio(net.graph());
        row.scenario = "s2";
        row.system = sys.name;
        row.seed = seed;
        row.round = r;
        report.rows.push_back(std::move(row));
      }
      check_conservation(net, expected);
    }
  }
  return report;
}

NaiveReport run_naive_baseline(const ChannelGraph& graph, const ExperimentConfig& config) {
  const NodeId customer = graph.node(config.naive_customer);
  const NodeId merchant = graph.node(config.naive_merchant);
  const Sat amount = config.naive_amount;
  const std::uint64_t seed = config.seeds.empty() ? 0 : config.seeds.front();
  NaiveReport report;

  {
    ChannelGraph g = graph;
    Ledger ledger(g.node_count(), config.network.ledger);
    const Sat expected = ledger.total(g);
    const Sat sink = ledger.fee_sink();
    const std::vector<ChannelId> own(g.incident(customer).begin(), g.incident(customer).end());
    for (const ChannelId c : own) ledger.close_channel(g, c);
    const ChannelId direct = ledger.open_channel(g, customer, merchant, amount, 0);
    Route route;
    route.hops = {customer, merchant};
    route.channels = {direct};
    ExecutionOptions exec;
    exec.config = config.network.dhtlc;
    exec.seed = mix64(seed, fnv1a64("naive"));
    const PaymentOutcome out = htlc_execute(g, ledger, route, amount, exec);
    if (ledger.total(g) != expected) throw std::logic_error("ledger conservation violated");
    report.naive = {out.success,
                    out.delivered,
                    ledger.on_chain_event_count(),
                    ledger.confirmation_waits(),
                    ledger.fee_sink() - sink,
                    out.fees_paid};
  }
  {
    PaymentNetwork net(graph, config.network, seed);
    const Sat expected = net.ledger().total(net.graph());
    const Sat sink = net.ledger().fee_sink();
    const Attempt a = net.pay_rapido(customer, merchant, amount, fee_budget_for(config, amount), 0);
    check_conservation(net, expected);
    report.rapido = {a.success,
                     a.outcome.delivered,
                     net.ledger().on_chain_event_count(),
                     net.ledger().confirmation_waits(),
                     net.ledger().fee_sink() - sink,
                     a.fee};
  }
  return report;
}

ExperimentReport run_experiment(const std::string& scenario, const ExperimentConfig& config) {
  if (scenario == "hops") return run_hops(config);
  if (scenario == "s1") return run_scenario1(config);
  if (scenario == "s2") return run_scenario2(config);
  if (scenario == "naive") {
    ExperimentReport report;
    report.scenario = "naive";
    const std::uint64_t seed = config.seeds.empty() ? 0 : config.seeds.front();
    report.naive = run_naive_baseline(build_graph(config.graph, seed), config);
    return report;
  }
  throw Error(ErrorCode::BadConfig, "unknown scenario: " + scenario);
}

}  // namespace rapido
