#include "rapido/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "rapido/config.hpp"
#include "rapido/error.hpp"
#include "rapido/experiments.hpp"
#include "rapido/network.hpp"
#include "rapido/routing.hpp"
#include "rapido/topology.hpp"
#include "rapido/vdp.hpp"

namespace rapido {

namespace {

using nlohmann::json;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string snapshot;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoFailure:
    case ErrorCode::MalformedSnapshot:
    case ErrorCode::DanglingEndpoint:
      return kExitIo;
    case ErrorCode::BadConfig:
    case ErrorCode::ConfigMismatch:
    case ErrorCode::UnknownNode:
    case ErrorCode::InfeasibleShape:
      return kExitUsage;
    default:
      return kExitPaymentFailed;
  }
}

Config load_config(const CommonOptions& o) {
  Config c = o.config_path.empty() ? Config() : Config::load(o.config_path);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadConfig, "--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.snapshot.empty()) c.set("graph.snapshot", o.snapshot);
  return c;
}

std::uint64_t pick_seed(const CommonOptions& o, const ExperimentConfig& e) {
  if (o.seed_given) return o.seed;
  return e.seeds.empty() ? 0 : e.seeds.front();
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_graph) {
  cmd->add_option("--config", o.config_path, "Key-value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "Override a config key (key=value)");
  if (with_graph) {
    cmd->add_option("--snapshot", o.snapshot, "Graph snapshot (JSON); default is the configured graph");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&o](std::uint64_t s) { o.seed = s, o.seed_given = true; }, "Seed for synthetic graphs and runs");
  }
}

json route_json(const ChannelGraph& g, const Route& r) {
  json nodes = json::array();
  for (const NodeId n : r.hops) nodes.push_back(g.name(n));
  return {{"hops", r.length()}, {"nodes", std::move(nodes)}};
}

std::vector<Sat> holdings(const ChannelGraph& g, const Ledger& ledger) {
  std::vector<Sat> h(g.node_count());
  for (std::uint32_t i = 0; i < h.size(); ++i) h[i] = ledger.on_chain(NodeId{i});
  for (const Channel& c : g.channels()) {
    if (!c.open) continue;
    h[c.a.value] += c.balance_a;
    h[c.b.value] += c.balance_b;
  }
  return h;
}

int cmd_ingest(const std::string& path, std::ostream& out) {
  const ChannelGraph g = load_graph_file(path);
  Sat capacity = 0;
  std::size_t funded = 0;
  for (const Channel& c : g.channels()) {
    capacity += c.capacity;
    if (c.balance_a + c.balance_b == c.capacity) ++funded;
  }
  out << json{{"nodes", g.node_count()},
              {"channels", g.channel_count()},
              {"capacity_sat", capacity},
              {"funded_channels", funded}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_synth(std::size_t nodes, std::size_t channels, std::uint64_t seed, const std::string& out_path,
              bool balances, const CommonOptions& o, std::ostream& out) {
  const ExperimentConfig e = experiment_config(load_config(o));
  ChannelGraph g = generate_synthetic_graph(nodes, channels, seed, e.graph.params);
  if (balances) g = assign_deposits(std::move(g));
  if (out_path.empty()) {
    write_snapshot(g, out, balances);
    return kExitOk;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoFailure, "cannot write '" + out_path + "'");
  write_snapshot(g, f, balances);
  if (!f) throw Error(ErrorCode::IoFailure, "write failed: '" + out_path + "'");
  return kExitOk;
}

int cmd_route(const std::string& from, const std::string& to, SimTime at, const CommonOptions& o, std::ostream& out) {
  const ExperimentConfig e = experiment_config(load_config(o));
  const std::uint64_t seed = pick_seed(o, e);
  PaymentNetwork net(build_graph(e.graph, seed), e.network, seed);
  const ChannelGraph& g = net.graph();
  const auto routes = candidate_paths(g, net.tables_at(at), g.node(from), g.node(to), e.network.max_candidates);
  for (const auto& r : routes) out << route_json(g, r).dump() << '\n';
  return kExitOk;
}

int cmd_split(const std::string& path, const CommonOptions& o, std::ostream& out) {
  const NetworkSettings s = network_settings(load_config(o));
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open instance '" + path + "'");
  const VdpInstance inst = read_instance(in);
  const VdpSolution sol = solve_vdp(inst, s.vdp);
  write_solution(inst, sol, out);
  return kExitOk;
}

int cmd_pay(const std::string& from, const std::string& to, Sat amount, const std::string& system, SimTime at,
            const CommonOptions& o, std::ostream& out) {
  if (amount <= 0) throw Error(ErrorCode::BadConfig, "--amount must be positive");
  const ExperimentConfig e = experiment_config(load_config(o));
  const std::uint64_t seed = pick_seed(o, e);
  PaymentNetwork net(build_graph(e.graph, seed), e.network, seed);
  const NodeId c = net.graph().node(from);
  const NodeId m = net.graph().node(to);
  const auto before = holdings(net.graph(), net.ledger());
  const Attempt a = system == "ln" ? net.pay_ln(c, m, amount, at)
                                   : net.pay_rapido(c, m, amount, fee_budget_for(e, amount), at);
  const auto after = holdings(net.graph(), net.ledger());

  const ChannelGraph& g = net.graph();
  json paths = json::array();
  for (const auto& p : a.outcome.paths) {
    json j = route_json(g, p.route);
    j["share"] = p.share;
    j["amounts"] = p.amounts;
    j["settled"] = p.settled;
    if (p.aborted_by) j["aborted_by"] = g.name(*p.aborted_by);
    paths.push_back(std::move(j));
  }
  json deltas = json::object();
  for (std::uint32_t i = 0; i < after.size(); ++i) {
    if (after[i] != before[i]) deltas[g.name(NodeId{i})] = after[i] - before[i];
  }
  json doc = {{"system", system},
              {"success", a.success},
              {"amount", amount},
              {"delivered", a.outcome.delivered},
              {"fees_paid", a.fee},
              {"paths", std::move(paths)},
              {"deltas", std::move(deltas)},
              {"on_chain_events", net.ledger().on_chain_event_count()},
              {"confirmation_waits", net.ledger().confirmation_waits()}};
  if (!a.success) doc["failure"] = a.failure;
  if (a.solution) doc["network_congestion"] = a.solution->network_congestion.to_double();
  out << doc.dump() << '\n';
  return a.success ? kExitOk : kExitPaymentFailed;
}

int cmd_experiment(const std::string& scenario, const std::string& dir, const CommonOptions& o, std::ostream& out) {
  ExperimentConfig e = experiment_config(load_config(o));
  if (o.seed_given) e.seeds = {o.seed};
  const ExperimentReport report = run_experiment(scenario, e);
  emit_report(report, dir);
  out << "wrote " << report.rows.size() << " metric rows";
  if (!report.hops.empty()) out << " and " << report.hops.size() << " hops rows";
  out << " to " << dir << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Payment channel network simulator", "rapido-net"};
  app.require_subcommand(1);

  CommonOptions common;

  std::string snapshot_path;
  auto* ingest = app.add_subcommand("ingest", "Load a snapshot and print a summary");
  ingest->add_option("snapshot", snapshot_path, "Snapshot JSON")->required();

  std::size_t nodes = 0, channels = 0;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  bool synth_balances = false;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic topology snapshot");
  synth->add_option("--nodes", nodes, "Node count")->required();
  synth->add_option("--channels", channels, "Channel count")->required();
  synth->add_option("--seed", synth_seed, "Seed")->required();
  synth->add_option("--out", synth_out, "Output file (default stdout)");
  synth->add_flag("--balances", synth_balances, "Include assigned balances");
  add_common(synth, common, false);

  std::string from, to, system = "rapido", instance_path, scenario, out_dir;
  SimTime at = 0;
  Sat amount = 0;
  auto* route = app.add_subcommand("route", "Print candidate paths as JSON lines");
  route->add_option("--from", from, "Customer")->required();
  route->add_option("--to", to, "Merchant")->required();
  route->add_option("--time", at, "Simulated time in seconds");
  add_common(route, common, true);

  auto* split = app.add_subcommand("split", "Solve a split instance from JSON");
  split->add_option("--instance", instance_path, "Instance JSON")->required();
  add_common(split, common, false);

  auto* pay = app.add_subcommand("pay", "Execute one payment");
  pay->add_option("--from", from, "Customer")->required();
  pay->add_option("--to", to, "Merchant")->required();
  pay->add_option("--amount", amount, "Amount in satoshis")->required();
  pay->add_option("--system", system, "rapido or ln")->check(CLI::IsMember({"rapido", "ln"}));
  pay->add_option("--time", at, "Simulated time in seconds");
  add_common(pay, common, true);

  auto* experiment = app.add_subcommand("experiment", "Run a scenario and write CSV/JSON reports");
  experiment->add_option("--scenario", scenario, "hops, s1, s2 or naive")
      ->required()
      ->check(CLI::IsMember({"hops", "s1", "s2", "naive"}));
  experiment->add_option("--out", out_dir, "Output directory")->required();
  add_common(experiment, common, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(snapshot_path, out);
    if (*synth) return cmd_synth(nodes, channels, synth_seed, synth_out, synth_balances, common, out);
    if (*route) return cmd_route(from, to, at, common, out);
    if (*split) return cmd_split(instance_path, common, out);
    if (*pay) return cmd_pay(from, to, amount, system, at, common, out);
    if (*experiment) return cmd_experiment(scenario, out_dir, common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitUsage;
}

}  // namespace rapido
