#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rapido/config.hpp"
#include "rapido/network.hpp"
#include "rapido/topology.hpp"
#include "rapido/types.hpp"

namespace rapido {

struct GraphSource {
  /// Snapshot path; empty means a synthetic graph per seed.
  std::string snapshot;
  std::size_t nodes = 2681;
  std::size_t channels = 7347;
  SynthParams params;
};

struct ExperimentConfig {
  GraphSource graph;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<Sat> buckets{10'000, 25'000, 50'000, 100'000};
  std::vector<Sat> adaptive_fees{30, 60, 80, 100};
  std::vector<Sat> fixed_fees{200, 200, 200, 200};
  std::size_t attempts = 1000;
  SimTime interarrival = 60;
  /// Probability of resampling a pair whose customer could pay directly.
  double exclude_direct = 0.0;
  std::size_t pair_count = 20;
  std::size_t round_count = 15;
  std::size_t hub_degree = 60;
  /// "adaptive" or "fixed": which restriction table Rapido uses in scenario 2.
  std::string s2_fee_policy = "adaptive";
  std::vector<std::size_t> beacon_counts{5, 50, 200, 500};
  std::size_t hop_pairs = 200;
  /// "fixed" uses fee_budget for every amount; "adaptive" looks the amount
  /// up in the adaptive table.
  std::string fee_budget_policy = "fixed";
  Sat fee_budget = 1000;
  std::string naive_customer = "Alice";
  std::string naive_merchant = "Bob";
  Sat naive_amount = 6;
  NetworkSettings network;
};

/// Throws ConfigMismatch when a restriction table does not align with the
/// buckets, BadConfig for out-of-range values.
ExperimentConfig experiment_config(const Config& config);

/// Restriction for the smallest bucket that holds `amount`; the last entry
/// for anything larger.
Sat restriction_for(const std::vector<Sat>& buckets, const std::vector<Sat>& fees, Sat amount);
/// Fee budget a single payment gets under config.fee_budget_policy.
Sat fee_budget_for(const ExperimentConfig& config, Sat amount);

/// Snapshot (deposits assigned when it carries no balances) or synthetic
/// graph for one seed.
ChannelGraph build_graph(const GraphSource& source, std::uint64_t seed);

struct MetricRow {
  std::string scenario;
  std::string system;
  Sat payment_value = 0;
  Sat fee_restriction = 0;
  Ratio success_rate{0, 1};
  double avg_fee = 0.0;
  double fee_stddev = 0.0;
  std::optional<Ratio> skewed_ratio;
  std::uint64_t seed = 0;
  /// Scenario 2 round; rows are emitted in round order.
  std::optional<std::size_t> round;
};

struct HopsRow {
  std::uint64_t seed = 0;
  std::size_t beacon_count = 0;
  /// Mean length of the route through each beacon, one route per beacon.
  double avg_hops = 0.0;
  /// Mean over the deduplicated candidate set instead.
  double candidate_avg_hops = 0.0;
  /// Mean graph distance between the same pairs.
  double baseline_avg_hops = 0.0;
  std::size_t pairs = 0;
  std::size_t routes = 0;
  std::size_t candidates = 0;
};

struct PrivacyStats {
  /// Settled Rapido payments with at least two active paths.
  std::size_t multipath_payments = 0;
  /// Of those, payments where some intermediary handled >= the full value.
  std::size_t exposed_payments = 0;
  /// Largest (amount seen by one intermediary) / payment value.
  Ratio worst{0, 1};
};

struct CostReport {
  bool success = false;
  Sat delivered = 0;
  std::size_t on_chain_events = 0;
  std::size_t confirmation_waits = 0;
  Sat on_chain_fees = 0;
  Sat routing_fees = 0;
};

struct NaiveReport {
  CostReport naive;
  CostReport rapido;
};

struct ExperimentReport {
  std::string scenario;
  std::vector<MetricRow> rows;
  std::vector<HopsRow> hops;
  PrivacyStats privacy;
  std::optional<NaiveReport> naive;
};

/// Beacon-routed hop counts per beacon count against the shortest-path
/// distance over the same sampled connected pairs.
std::vector<HopsRow> run_hops_experiment(const ChannelGraph& graph, const std::vector<std::size_t>& beacon_counts,
                                         std::size_t pair_count, std::uint64_t seed);

ExperimentReport run_hops(const ExperimentConfig& config);
ExperimentReport run_scenario1(const ExperimentConfig& config);
ExperimentReport run_scenario2(const ExperimentConfig& config);
/// Close the customer's channels, open one to the merchant, pay directly;
/// side by side with a Rapido payment on an untouched copy of the graph.
NaiveReport run_naive_baseline(const ChannelGraph& graph, const ExperimentConfig& config);

/// Dispatches on "hops", "s1", "s2" or "naive". Throws BadConfig otherwise.
ExperimentReport run_experiment(const std::string& scenario, const ExperimentConfig& config);

/// Writes metrics.csv and summary.json (plus hops.csv for the hops study)
/// into `directory`, creating it if needed. Byte-deterministic.
/// Throws IoFailure.
void emit_report(const ExperimentReport& report, const std::string& directory);

void write_metrics_csv(const std::vector<MetricRow>& rows, std::ostream& out);
void write_summary_json(const ExperimentReport& report, std::ostream& out);

}  // namespace rapido
