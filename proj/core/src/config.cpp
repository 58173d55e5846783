#include "rapido/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

#include "rapido/error.hpp"
#include "rapido/vdp.hpp"

namespace rapido {

namespace {

constexpr ConfigKey kKeys[] = {
    {"graph.snapshot", "", "snapshot JSON to load; empty means generate a synthetic graph"},
    {"graph.nodes", "2681", "synthetic graph node count"},
    {"graph.channels", "7347", "synthetic graph channel count"},
    {"graph.capacity_min", "20000", "smallest synthetic channel capacity (sat)"},
    {"graph.capacity_max", "16777215", "largest synthetic channel capacity (sat)"},
    {"graph.base_fee_max", "2", "synthetic base fees are drawn from 0..max (sat)"},
    {"graph.fee_rate_min_ppm", "1", "smallest synthetic fee rate (ppm)"},
    {"graph.fee_rate_max_ppm", "1000", "largest synthetic fee rate (ppm)"},
    {"beacon.count", "200", "number of portions, one beacon each"},
    {"beacon.period_hours", "12", "beacon election period"},
    {"beacon.seed", "0", "mixed into the run seed for partitioning and election"},
    {"routing.max_candidates", "10", "candidate paths handed to the split solver"},
    {"vdp.threshold", "0.95", "per-hop congestion threshold"},
    {"vdp.threshold_mode", "upper", "upper, lower or off"},
    {"vdp.fee_budget_policy", "fixed", "fixed uses vdp.fee_budget; adaptive looks the payment up in the bucket table"},
    {"vdp.fee_budget", "1000", "fee budget for single payments under the fixed policy (sat)"},
    {"vdp.node_budget", "64", "branch-and-bound node limit per split"},
    {"vdp.relative_gap", "0.000001", "stop once the split is this close to the bound"},
    {"vdp.accept_probability", "1", "probability an intermediary accepts a split request"},
    {"vdp.max_retries", "2", "re-splits after refusals before giving up"},
    {"vdp.privacy_guard", "1", "keep every share's first hop below the payment value (0 or 1)"},
    {"ledger.open_fee", "1000", "on-chain fee to open a channel (sat)"},
    {"ledger.close_fee", "1000", "on-chain fee to close a channel (sat)"},
    {"ledger.confirmation_delay", "660", "seconds an on-chain transaction waits"},
    {"ledger.initial_on_chain", "1000000", "starting on-chain balance of every node (sat)"},
    {"dhtlc.hop_delta", "86400", "timelock step between hops (s)"},
    {"dhtlc.cash_multiplier", "10", "collateral = multiplier x own fee"},
    {"dhtlc.contract_deadline", "600", "seconds a node has to create its contract"},
    {"dhtlc.max_step_delay", "30", "honest protocol step latency upper bound (s)"},
    {"experiment.seeds", "1,2,3", "seeds, one run each"},
    {"experiment.attempts", "1000", "payment attempts per bucket (scenario 1)"},
    {"experiment.buckets", "10000,25000,50000,100000", "payment values (sat)"},
    {"experiment.adaptive_fees", "30,60,80,100", "fee budget per bucket, adaptive policy"},
    {"experiment.fixed_fees", "200,200,200,200", "fee budget per bucket, fixed policy"},
    {"experiment.pairs", "20", "customer-merchant pairs (scenario 2)"},
    {"experiment.rounds", "15", "payment rounds (scenario 2)"},
    {"experiment.hub_degree", "60", "minimum degree of a hub (scenario 2)"},
    {"experiment.s2_fee_policy", "adaptive", "fee table used by the split solver in scenario 2"},
    {"experiment.beacon_counts", "5,50,200,500", "beacon counts compared by the hops study"},
    {"experiment.hop_pairs", "200", "sampled node pairs per hops measurement"},
    {"experiment.interarrival", "60", "seconds between consecutive payments"},
    {"experiment.exclude_direct", "0", "probability of resampling a pair joined by a sufficient direct channel"},
    {"experiment.naive_customer", "Alice", "customer of the close-and-reopen comparison"},
    {"experiment.naive_merchant", "Bob", "merchant of the close-and-reopen comparison"},
    {"experiment.naive_amount", "6", "payment value of the close-and-reopen comparison (sat)"},
};

const ConfigKey* find_key(std::string_view name) {
  for (const auto& k : kKeys) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::int64_t to_int(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw Error(ErrorCode::BadConfig, key + ": not an integer: " + text);
  return v;
}

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::BadConfig, "line " + std::to_string(number) + ": expected key = value");
    }
    cfg.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read config " + path);
  return parse(in);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!find_key(key)) throw Error(ErrorCode::BadConfig, "unknown config key: " + key);
  values_[key] = value;
}

std::string Config::get_string(const std::string& key) const {
  const ConfigKey* k = find_key(key);
  if (!k) throw Error(ErrorCode::BadConfig, "unknown config key: " + key);
  const auto it = values_.find(key);
  return it != values_.end() ? it->second : std::string(k->default_value);
}

std::int64_t Config::get_int(const std::string& key) const { return to_int(key, get_string(key)); }

double Config::get_double(const std::string& key) const {
  const std::string text = get_string(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadConfig, key + ": not a number: " + text);
  }
}

Ratio Config::get_ratio(const std::string& key) const { return parse_decimal_ratio(get_string(key)); }

std::vector<std::int64_t> Config::get_int_list(const std::string& key) const {
  const std::string text = get_string(key);
  std::vector<std::int64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    const std::string item = trim(std::string_view(text).substr(start, comma - start));
    if (!item.empty()) out.push_back(to_int(key, item));
    start = comma + 1;
  }
  return out;
}

}  // namespace rapido
