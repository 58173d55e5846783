#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adversary.hpp"
#include "oracles.hpp"
#include "rapido/cli.hpp"
#include "rapido/error.hpp"
#include "rapido/experiments.hpp"
#include "rapido/vdp.hpp"

namespace {

using namespace rapido;
using nlohmann::json;

const std::string kData = RAPIDO_TEST_DATA;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict three_route_fixture() {
  const std::vector<std::string> base{"pay",    "--snapshot", kData + "/three_route.json",
                                      "--config", kData + "/three_route.conf",
                                      "--from", "Alice", "--to", "Bob", "--amount", "6"};
  auto ln_args = base;
  ln_args.insert(ln_args.end(), {"--system", "ln"});
  const CliRun ln = cli(ln_args);
  if (ln.code != kExitPaymentFailed || (ln.out + ln.err).find("NoRoute") == std::string::npos) {
    return {false, "baseline did not fail with NoRoute (exit " + std::to_string(ln.code) + ")"};
  }
  auto rp_args = base;
  rp_args.insert(rp_args.end(), {"--system", "rapido"});
  const CliRun rp = cli(rp_args);
  if (rp.code != kExitOk) return {false, "rapido exit " + std::to_string(rp.code) + ": " + rp.err};
  const json j = json::parse(rp.out);
  Sat sum = 0;
  std::size_t active = 0;
  bool settled = true;
  for (const auto& p : j["paths"]) {
    const Sat share = p["share"].get<Sat>();
    sum += share;
    active += share > 0;
    settled = settled && p["settled"].get<bool>();
  }
  const Sat bob = j["deltas"]["Bob"].get<Sat>();
  const auto events = j["on_chain_events"].get<std::size_t>();
  const bool ok = j["success"].get<bool>() && settled && sum == 6 && active == 3 && bob == 6 && events == 0;
  return {ok, "baseline NoRoute; rapido shares sum " + std::to_string(sum) + " over " + std::to_string(active) +
                  " paths, merchant +" + std::to_string(bob) + ", on-chain events " + std::to_string(events)};
}

Verdict htlc_example() {
  const CliRun r = cli({"pay", "--snapshot", kData + "/single_route.json", "--from", "Alice", "--to", "Bob", "--amount",
                        "100000000", "--system", "ln"});
  if (r.code != kExitOk) return {false, "exit " + std::to_string(r.code) + ": " + r.err};
  const json d = json::parse(r.out)["deltas"];
  const Sat alice = d["Alice"].get<Sat>(), carol = d["Carol"].get<Sat>(), bob = d["Bob"].get<Sat>();
  const bool ok = alice == -110'000'000 && carol == 10'000'000 && bob == 100'000'000;
  return {ok, "Alice " + std::to_string(alice) + ", Carol +" + std::to_string(carol) + ", Bob +" + std::to_string(bob)};
}

Verdict vdp_oracle() {
  Rng rng(0x5eed'0003);
  std::size_t mismatches = 0, feasible = 0;
  for (int i = 0; i < 500; ++i) {
    const VdpInstance in = testing::random_vdp_instance(rng, 4, 3, 100);
    const auto expected = testing::brute_force_vdp(in);
    try {
      const VdpSolution s = solve_vdp(in);
      if (!expected || !check_split(in, s.shares).feasible) {
        ++mismatches;
        continue;
      }
      ++feasible;
      const testing::Frac got{s.network_congestion.num, s.network_congestion.den};
      if (!testing::frac_equal(got, *expected)) {
        const double a = s.network_congestion.to_double();
        const double b = static_cast<double>(expected->num) / static_cast<double>(expected->den);
        if (std::fabs(a - b) > 1e-9 * std::max(1.0, std::fabs(b))) ++mismatches;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoFeasibleSplit || expected) ++mismatches;
    }
  }
  return {mismatches == 0, "500 instances, " + std::to_string(feasible) + " feasible, " + std::to_string(mismatches) +
                               " mismatches"};
}

Verdict dhtlc_schedules() {
  std::size_t violations = 0, successes = 0, punished = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 10'000; ++seed) {
    const auto r = testing::run_adversary_schedule(mix64(seed, 0xacce97));
    if (!r.ok) {
      if (violations++ == 0) first = " (first: " + r.failure + ")";
    }
    successes += r.success;
    punished += r.any_punished;
  }
  return {violations == 0, "10000 schedules, " + std::to_string(successes) + " settled, " + std::to_string(punished) +
                               " with punishment, " + std::to_string(violations) + " violations" + first};
}

Verdict hops_ordering() {
  ExperimentConfig cfg = experiment_config(Config{});
  cfg.seeds = {1, 2, 3, 4, 5};
  const ExperimentReport r = run_hops(cfg);
  bool ok = r.hops.size() == cfg.seeds.size() * cfg.beacon_counts.size();
  double worst_spread = 0.0;
  std::string detail;
  for (const std::uint64_t seed : cfg.seeds) {
    double lo = 1e18, hi = 0, sum = 0;
    std::size_t n = 0;
    for (const HopsRow& h : r.hops) {
      if (h.seed != seed) continue;
      ok = ok && h.avg_hops > h.baseline_avg_hops;
      lo = std::min(lo, h.avg_hops);
      hi = std::max(hi, h.avg_hops);
      sum += h.avg_hops;
      ++n;
    }
    const double spread = n ? (hi - lo) / (sum / static_cast<double>(n)) : 1.0;
    worst_spread = std::max(worst_spread, spread);
  }
  std::map<std::size_t, double> beacon;
  double baseline = 0;
  for (const HopsRow& h : r.hops) {
    beacon[h.beacon_count] += h.avg_hops / static_cast<double>(cfg.seeds.size());
    baseline += h.baseline_avg_hops / static_cast<double>(r.hops.size());
  }
  double lo = 1e18, hi = 0, sum = 0;
  for (const auto& [count, avg] : beacon) {
    detail += "h=" + std::to_string(count) + " " + fmt("%.3f", avg) + ", ";
    ok = ok && avg > baseline;
    lo = std::min(lo, avg);
    hi = std::max(hi, avg);
    sum += avg;
  }
  const double spread = beacon.empty() ? 1.0 : (hi - lo) / (sum / static_cast<double>(beacon.size()));
  ok = ok && spread < 0.15 && worst_spread < 0.15;
  detail += "baseline " + fmt("%.3f", baseline) + ", spread " + fmt("%.1f%%", 100 * spread) +
            ", worst per-seed spread " + fmt("%.1f%%", 100 * worst_spread);
  return {ok, detail};
}

struct Scenario1Result {
  Verdict verdict;
  PrivacyStats privacy;
};

Scenario1Result scenario1() {
  ExperimentConfig cfg = experiment_config(Config{});
  cfg.seeds = {1, 2, 3};
  const ExperimentReport r = run_scenario1(cfg);
  std::map<std::tuple<std::uint64_t, Sat, std::string>, Ratio> rate;
  for (const MetricRow& row : r.rows) rate[{row.seed, row.payment_value, row.system}] = row.success_rate;
  bool rapido_vs_ln = true, relaxed_vs_tight = true;
  std::string detail;
  for (const std::uint64_t seed : cfg.seeds) {
    for (const Sat b : cfg.buckets) {
      const Ratio ln = rate.at({seed, b, "ln"});
      const Ratio fixed = rate.at({seed, b, "rapido_fixed"});
      const Ratio adaptive = rate.at({seed, b, "rapido_adaptive"});
      rapido_vs_ln = rapido_vs_ln && fixed >= ln && adaptive >= ln;
      relaxed_vs_tight = relaxed_vs_tight && fixed >= adaptive;
      if (seed == cfg.seeds.front()) {
        detail += std::to_string(b) + ": ln " + fmt("%.3f", ln.to_double()) + " fixed " +
                  fmt("%.3f", fixed.to_double()) + " adaptive " + fmt("%.3f", adaptive.to_double()) + "; ";
      }
    }
  }
  detail = std::string("rapido>=ln ") + (rapido_vs_ln ? "holds" : "violated") + ", fixed>=adaptive " +
           (relaxed_vs_tight ? "holds" : "violated") + " [seed 1: " + detail.substr(0, detail.size() - 2) + "]";
  return {{rapido_vs_ln && relaxed_vs_tight, detail}, r.privacy};
}

Verdict scenario2() {
  ExperimentConfig cfg = experiment_config(Config{});
  cfg.seeds = {1, 2, 3};
  const ExperimentReport r = run_scenario2(cfg);
  bool ok = true;
  std::string detail;
  for (const std::uint64_t seed : cfg.seeds) {
    std::map<std::string, Ratio> last;
    for (const MetricRow& row : r.rows) {
      if (row.seed == seed && row.skewed_ratio) last[row.system] = *row.skewed_ratio;
    }
    if (!last.count("ln")) return {false, "missing baseline skewed ratio rows"};
    const Ratio ln = last.at("ln");
    const auto it = last.find("rapido_" + cfg.s2_fee_policy);
    if (it == last.end()) return {false, "missing rapido skewed ratio rows"};
    const Ratio rapido = it->second;
    ok = ok && rapido <= ln;
    detail += "seed " + std::to_string(seed) + ": rapido " + fmt("%.4f", rapido.to_double()) + " ln " +
              fmt("%.4f", ln.to_double()) + "; ";
  }
  return {ok, detail.substr(0, detail.size() - 2)};
}

Verdict naive_gap() {
  const auto dir = std::filesystem::temp_directory_path() / "rapido_acceptance_naive";
  std::filesystem::remove_all(dir);
  const CliRun r = cli({"experiment", "--scenario", "naive", "--snapshot", kData + "/three_route.json", "--config",
                        kData + "/three_route.conf", "--out", dir.string()});
  if (r.code != kExitOk) return {false, "exit " + std::to_string(r.code) + ": " + r.err};
  std::ifstream in(dir / "summary.json");
  const json n = json::parse(in)["naive"];
  std::filesystem::remove_all(dir);
  const auto ne = n["naive"]["on_chain_events"].get<std::size_t>();
  const auto nw = n["naive"]["confirmation_waits"].get<std::size_t>();
  const auto re = n["rapido"]["on_chain_events"].get<std::size_t>();
  const auto rw = n["rapido"]["confirmation_waits"].get<std::size_t>();
  const bool delivered = n["naive"]["delivered"].get<Sat>() == 6 && n["rapido"]["delivered"].get<Sat>() == 6;
  const bool ok = delivered && ne >= 4 && nw == 4 && re == 0 && rw == 0;
  return {ok, "naive " + std::to_string(ne) + " on-chain events / " + std::to_string(nw) + " waits / " +
                  std::to_string(n["naive"]["on_chain_fees"].get<Sat>()) + " sat fees; rapido " + std::to_string(re) +
                  " / " + std::to_string(rw)};
}

Verdict determinism() {
  const auto root = std::filesystem::temp_directory_path() / "rapido_acceptance_determinism";
  std::filesystem::remove_all(root);
  const std::vector<std::string> reduced{
      "--set", "graph.nodes=400",        "--set", "graph.channels=1100",
      "--set",           "experiment.seeds=11,12",                  "--set", "experiment.attempts=25",
      "--set",           "experiment.pairs=6",                      "--set", "experiment.rounds=4",
      "--set",           "experiment.hop_pairs=30",                 "--set", "beacon.count=30",
      "--set",           "experiment.beacon_counts=5,30"};
  std::size_t compared = 0;
  for (const std::string scenario : {"hops", "s1", "s2", "naive"}) {
    std::vector<std::string> args{"experiment", "--scenario", scenario};
    if (scenario == "naive") {
      args.insert(args.end(), {"--snapshot", kData + "/three_route.json", "--config", kData + "/three_route.conf"});
    } else {
      args.insert(args.end(), reduced.begin(), reduced.end());
    }
    for (const char* run : {"a", "b"}) {
      auto a = args;
      a.insert(a.end(), {"--out", (root / scenario / run).string()});
      const CliRun r = cli(a);
      if (r.code != kExitOk) return {false, scenario + " exit " + std::to_string(r.code) + ": " + r.err};
    }
    for (const auto& entry : std::filesystem::directory_iterator(root / scenario / "a")) {
      const auto name = entry.path().filename();
      if (slurp(entry.path()) != slurp(root / scenario / "b" / name)) {
        return {false, scenario + "/" + name.string() + " differs between runs"};
      }
      ++compared;
    }
  }
  std::filesystem::remove_all(root);
  return {compared >= 9, std::to_string(compared) + " report files identical across two runs of hops, s1, s2, naive"};
}

Verdict privacy(const PrivacyStats& p) {
  const bool ok = p.multipath_payments > 0 && p.exposed_payments == 0 && p.worst < Ratio{1, 1};
  return {ok, std::to_string(p.multipath_payments) + " settled multi-path payments, " +
                  std::to_string(p.exposed_payments) + " exposed, worst per-intermediary share " +
                  fmt("%.6f", p.worst.to_double()) + " of P"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Verdict()> run;
  };
  PrivacyStats s1_privacy;
  bool s1_ran = false;
  const std::vector<Criterion> criteria{
      {1, "three-route fixture payment", 1.0, three_route_fixture},
      {2, "single-path HTLC worked example", 1.0, htlc_example},
      {3, "split solver matches exhaustive optimum", 30.0, vdp_oracle},
      {4, "D-HTLC atomicity and conservation", 60.0, dhtlc_schedules},
      {5, "beacon hops ordering", 120.0, hops_ordering},
      {6, "scenario 1 success orderings", 180.0,
       [&] {
         auto r = scenario1();
         s1_privacy = r.privacy;
         s1_ran = true;
         return r.verdict;
       }},
      {7, "scenario 2 skewness ordering", 180.0, scenario2},
      {8, "naive close/open cost gap", 60.0, naive_gap},
      {9, "experiment determinism", 300.0, determinism},
      {10, "value privacy of multi-path splits", 1.0,
       [&] { return s1_ran ? privacy(s1_privacy) : Verdict{false, "scenario 1 did not run"}; }},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.limit_seconds) {
      v.pass = false;
      v.detail += "; over the " + fmt("%.0f", c.limit_seconds) + " s limit";
    }
    failed += !v.pass;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
