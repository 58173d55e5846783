#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "rapido/error.hpp"
#include "rapido/topology.hpp"

namespace rapido {

namespace {

using nlohmann::json;

std::int64_t require_int(const json& obj, const char* key, bool allow_missing = false, std::int64_t fallback = 0) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    if (allow_missing) return fallback;
    throw Error(ErrorCode::MalformedSnapshot, std::string("missing field '") + key + "'");
  }
  if (!it->is_number_integer()) {
    throw Error(ErrorCode::MalformedSnapshot, std::string("field '") + key + "' must be an integer");
  }
  const auto v = it->get<std::int64_t>();
  if (v < 0) throw Error(ErrorCode::MalformedSnapshot, std::string("field '") + key + "' must be nonnegative");
  return v;
}

std::string require_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::MalformedSnapshot, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

ChannelGraph load_graph(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedSnapshot, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::MalformedSnapshot, "top level must be an object");

  GraphBuilder builder;
  const auto nodes = doc.find("nodes");
  const auto channels = doc.find("channels");
  if (nodes != doc.end()) {
    if (!nodes->is_array()) throw Error(ErrorCode::MalformedSnapshot, "'nodes' must be an array");
    for (const auto& n : *nodes) {
      if (!n.is_object()) throw Error(ErrorCode::MalformedSnapshot, "node entries must be objects");
      FeePolicy policy;
      policy.base_fee = require_int(n, "base_fee_msat") / 1000;
      policy.fee_rate_ppm = require_int(n, "fee_rate_ppm");
      builder.add_node(require_string(n, "id"), policy);
    }
  }
  if (channels != doc.end()) {
    if (!channels->is_array()) throw Error(ErrorCode::MalformedSnapshot, "'channels' must be an array");
    for (const auto& c : *channels) {
      if (!c.is_object()) throw Error(ErrorCode::MalformedSnapshot, "channel entries must be objects");
      const Sat capacity = require_int(c, "capacity_sat");
      if (c.contains("balance_a_sat") || c.contains("balance_b_sat")) {
        builder.add_channel(require_string(c, "a"), require_string(c, "b"), capacity, require_int(c, "balance_a_sat"),
                            require_int(c, "balance_b_sat"));
      } else {
        builder.add_channel(require_string(c, "a"), require_string(c, "b"), capacity);
      }
    }
  }
  return std::move(builder).build();
}

ChannelGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open snapshot '" + path + "'");
  return load_graph(in);
}

void write_snapshot(const ChannelGraph& graph, std::ostream& out, bool include_balances) {
  json nodes = json::array();
  for (std::uint32_t i = 0; i < graph.node_count(); ++i) {
    const NodeId n{i};
    const auto& fee = graph.fee_policy(n);
    nodes.push_back({{"id", graph.name(n)}, {"base_fee_msat", fee.base_fee * 1000}, {"fee_rate_ppm", fee.fee_rate_ppm}});
  }
  json channels = json::array();
  for (const auto& c : graph.channels()) {
    if (!c.open) continue;
    json entry = {{"a", graph.name(c.a)}, {"b", graph.name(c.b)}, {"capacity_sat", c.capacity}};
    if (include_balances) {
      entry["balance_a_sat"] = c.balance_a;
      entry["balance_b_sat"] = c.balance_b;
    }
    channels.push_back(std::move(entry));
  }
  out << json{{"nodes", std::move(nodes)}, {"channels", std::move(channels)}}.dump(1) << '\n';
}

}  // namespace rapido
