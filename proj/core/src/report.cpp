#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "rapido/error.hpp"
#include "rapido/experiments.hpp"

namespace rapido {

namespace {

using nlohmann::json;

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

json ratio_json(Ratio r) { return {{"num", r.num}, {"den", r.den}, {"value", fixed(r.to_double())}}; }

json cost_json(const CostReport& c) {
  return {{"success", c.success},
          {"delivered", c.delivered},
          {"on_chain_events", c.on_chain_events},
          {"confirmation_waits", c.confirmation_waits},
          {"on_chain_fees", c.on_chain_fees},
          {"routing_fees", c.routing_fees}};
}

json row_json(const MetricRow& r) {
  json j = {{"system", r.system},
            {"payment_value", r.payment_value},
            {"fee_restriction", r.fee_restriction},
            {"success_rate", ratio_json(r.success_rate)},
            {"avg_fee", fixed(r.avg_fee)},
            {"fee_stddev", fixed(r.fee_stddev)},
            {"seed", r.seed}};
  j["skewed_ratio"] = r.skewed_ratio ? ratio_json(*r.skewed_ratio) : json(nullptr);
  if (r.round) j["round"] = *r.round;
  return j;
}

json hops_json(const std::vector<HopsRow>& rows) {
  json j;
  j["rows"] = json::array();
  std::map<std::size_t, std::pair<double, std::size_t>> per_count;
  std::map<std::uint64_t, double> baseline_per_seed;
  for (const auto& r : rows) {
    j["rows"].push_back({{"seed", r.seed},
                         {"beacon_count", r.beacon_count},
                         {"avg_hops", fixed(r.avg_hops)},
                         {"candidate_avg_hops", fixed(r.candidate_avg_hops)},
                         {"baseline_avg_hops", fixed(r.baseline_avg_hops)},
                         {"pairs", r.pairs},
                         {"routes", r.routes},
                         {"candidates", r.candidates}});
    auto& [sum, n] = per_count[r.beacon_count];
    sum += r.avg_hops;
    ++n;
    baseline_per_seed[r.seed] = r.baseline_avg_hops;
  }
  json means = json::object();
  double lo = 0, hi = 0, total = 0;
  bool first = true;
  for (const auto& [h, acc] : per_count) {
    const double mean = acc.first / static_cast<double>(acc.second);
    means[std::to_string(h)] = fixed(mean);
    lo = first ? mean : std::min(lo, mean);
    hi = first ? mean : std::max(hi, mean);
    total += mean;
    first = false;
  }
  double baseline_total = 0;
  for (const auto& [seed, v] : baseline_per_seed) baseline_total += v;
  j["beacon_avg_hops"] = means;
  const auto seeds = static_cast<double>(baseline_per_seed.size());
  j["baseline_avg_hops"] = fixed(baseline_per_seed.empty() ? 0.0 : baseline_total / seeds);
  const double mean_of_means = per_count.empty() ? 0.0 : total / static_cast<double>(per_count.size());
  j["relative_spread"] = fixed(mean_of_means > 0 ? (hi - lo) / mean_of_means : 0.0);
  return j;
}

json series_json(const std::vector<MetricRow>& rows) {
  // seed -> system -> skewed ratio per round
  json j = json::object();
  for (const auto& r : rows) {
    if (!r.round) continue;
    auto& s = j[std::to_string(r.seed)][r.system];
    s.push_back(r.skewed_ratio ? json(fixed(r.skewed_ratio->to_double())) : json(nullptr));
  }
  return j;
}

}  // namespace

void write_metrics_csv(const std::vector<MetricRow>& rows, std::ostream& out) {
  out << "scenario,system,payment_value,fee_restriction,success_rate,avg_fee,fee_stddev,skewed_ratio,seed\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.system << ',' << r.payment_value << ',' << r.fee_restriction << ','
        << fixed(r.success_rate.to_double()) << ',' << fixed(r.avg_fee) << ',' << fixed(r.fee_stddev) << ','
        << (r.skewed_ratio ? fixed(r.skewed_ratio->to_double()) : std::string()) << ',' << r.seed << '\n';
  }
}

void write_summary_json(const ExperimentReport& report, std::ostream& out) {
  json j;
  j["scenario"] = report.scenario;
  j["rows"] = json::array();
  for (const auto& r : report.rows) j["rows"].push_back(row_json(r));
  if (report.scenario == "s1") {
    j["privacy"] = {{"multipath_payments", report.privacy.multipath_payments},
                    {"exposed_payments", report.privacy.exposed_payments},
                    {"worst_fraction", ratio_json(report.privacy.worst)}};
  }
  if (report.scenario == "s2") j["skewed_series"] = series_json(report.rows);
  if (!report.hops.empty()) j["hops"] = hops_json(report.hops);
  if (report.naive) j["naive"] = {{"naive", cost_json(report.naive->naive)}, {"rapido", cost_json(report.naive->rapido)}};
  out << j.dump(2) << '\n';
}

void emit_report(const ExperimentReport& report, const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec || !fs::is_directory(directory)) throw Error(ErrorCode::IoFailure, "cannot create " + directory);
  const auto write = [&](const std::string& name, auto&& body) {
    const fs::path path = fs::path(directory) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
  };
  write("metrics.csv", [&](std::ostream& o) { write_metrics_csv(report.rows, o); });
  write("summary.json", [&](std::ostream& o) { write_summary_json(report, o); });
  if (!report.hops.empty()) {
    write("hops.csv", [&](std::ostream& o) {
      o << "seed,beacon_count,avg_hops,candidate_avg_hops,baseline_avg_hops,pairs,routes,candidates\n";
      for (const auto& r : report.hops) {
        o << r.seed << ',' << r.beacon_count << ',' << fixed(r.avg_hops) << ',' << fixed(r.candidate_avg_hops) << ','
          << fixed(r.baseline_avg_hops) << ',' << r.pairs << ',' << r.routes << ',' << r.candidates << '\n';
      }
    });
  }
}

}  // namespace rapido
