#include "rapido/vdp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "rapido/error.hpp"
#include "rapido/lp.hpp"
#include "rapido/rng.hpp"

namespace rapido {

VdpPath to_vdp_path(const ChannelGraph& graph, const PathProbe& probe) {
  VdpPath path;
  const Route& r = probe.route;
  for (std::size_t j = 0; j < r.channels.size(); ++j) {
    const Channel& c = graph.channel(r.channels[j]);
    path.hops.push_back({link_key(r.channels[j], r.hops[j] == c.a), probe.sendable[j], probe.forwarder_fee[j]});
  }
  return path;
}

VdpInstance make_instance(const ChannelGraph& graph, const std::vector<PathProbe>& probes, Sat payment_value,
                          Sat fee_budget, Ratio threshold, ThresholdMode mode) {
  VdpInstance inst;
  inst.payment_value = payment_value;
  inst.fee_budget = fee_budget;
  inst.threshold = threshold;
  inst.threshold_mode = mode;
  for (const auto& p : probes) inst.paths.push_back(to_vdp_path(graph, p));
  return inst;
}

Ratio channel_congestion(Sat share, Sat deposit) {
  if (deposit <= 0) throw Error(ErrorCode::ZeroDeposit, "deposit must be positive");
  return {share, deposit};
}

std::vector<Sat> forwarded_amounts(const VdpPath& path, Sat share) {
  std::vector<Sat> amounts(path.hops.size());
  if (amounts.empty() || share == 0) return amounts;
  amounts.back() = share;
  for (std::size_t h = amounts.size() - 1; h-- > 0;) {
    amounts[h] = amounts[h + 1] + path.hops[h].forwarder_fee.fee(amounts[h + 1]);
  }
  return amounts;
}

Sat path_fee(const VdpPath& path, Sat share) {
  if (path.hops.empty()) return 0;
  return forwarded_amounts(path, share).front() - share;
}

Sat path_fee(const PathProbe& probe, Sat share) {
  VdpPath path;
  for (const auto& fee : probe.forwarder_fee) path.hops.push_back({0, 0, fee});
  return path_fee(path, share);
}

namespace {

/// Instance preprocessed into dense link indices.
struct Prepared {
  const VdpInstance* inst = nullptr;
  std::size_t k = 0;
  std::vector<Sat> dep;                          // per link
  std::vector<std::vector<int>> hop_link;        // [path][hop]
  std::vector<std::vector<Sat>> base_down;       // [path][hop] base fees charged downstream of the hop
  std::vector<std::vector<int>> link_paths;      // distinct paths per link
  std::vector<Sat> share_cap;                    // per path upper bound on any feasible share
  std::vector<Sat> base_sum;
  std::vector<double> rate_sum;                  // fraction, not ppm
  std::vector<double> floor_slack;               // rounding slack of the rate terms
};

Prepared prepare(const VdpInstance& inst) {
  if (inst.payment_value <= 0) throw Error(ErrorCode::InvalidInstance, "payment value must be positive");
  if (inst.fee_budget < 0) throw Error(ErrorCode::InvalidInstance, "fee budget must be nonnegative");
  if (inst.paths.empty()) throw Error(ErrorCode::InvalidInstance, "no candidate paths");
  if (inst.threshold.den <= 0 || inst.threshold.num < 0) throw Error(ErrorCode::InvalidInstance, "bad threshold");

  Prepared p;
  p.inst = &inst;
  p.k = inst.paths.size();
  std::map<std::uint64_t, int> index;
  for (const auto& path : inst.paths) {
    if (path.hops.empty()) throw Error(ErrorCode::InvalidInstance, "path without hops");
    for (const auto& hop : path.hops) {
      if (hop.deposit < 0) throw Error(ErrorCode::InvalidInstance, "negative deposit");
      auto [it, inserted] = index.emplace(hop.link, static_cast<int>(p.dep.size()));
      if (inserted) {
        p.dep.push_back(hop.deposit);
      } else {
        p.dep[it->second] = std::min(p.dep[it->second], hop.deposit);
      }
    }
  }
  p.link_paths.resize(p.dep.size());
  p.hop_link.resize(p.k);
  p.base_down.resize(p.k);
  p.share_cap.assign(p.k, inst.payment_value);
  p.base_sum.assign(p.k, 0);
  p.rate_sum.assign(p.k, 0.0);
  p.floor_slack.assign(p.k, 0.0);
  for (std::size_t i = 0; i < p.k; ++i) {
    const auto& hops = inst.paths[i].hops;
    const std::size_t len = hops.size();
    p.base_down[i].assign(len, 0);
    for (std::size_t h = len - 1; h-- > 0;) {
      p.base_down[i][h] = p.base_down[i][h + 1] + hops[h].forwarder_fee.base_fee;
      p.rate_sum[i] += static_cast<double>(hops[h].forwarder_fee.fee_rate_ppm) / 1e6;
      if (hops[h].forwarder_fee.fee_rate_ppm > 0) p.floor_slack[i] += 0.999999;
    }
    p.base_sum[i] = p.base_down[i][0];
    for (std::size_t h = 0; h < len; ++h) {
      const int l = index.at(hops[h].link);
      p.hop_link[i].push_back(l);
      auto& users = p.link_paths[l];
      if (std::find(users.begin(), users.end(), static_cast<int>(i)) == users.end()) users.push_back(static_cast<int>(i));
      Sat cap = p.dep[l] - 1 - p.base_down[i][h];
      if (inst.threshold_mode == ThresholdMode::Upper) {
        const __int128 t = static_cast<__int128>(inst.threshold.num) * p.dep[l] / inst.threshold.den;
        cap = std::min<Sat>(cap, static_cast<Sat>(t));
      }
      p.share_cap[i] = std::min(p.share_cap[i], cap);
    }
    p.share_cap[i] = std::max<Sat>(p.share_cap[i], 0);
  }
  return p;
}

struct Evaluation {
  bool feasible = false;
  std::string violation;
  Ratio mu;
  Sat fees = 0;
};

Evaluation evaluate(const Prepared& p, std::span<const Sat> shares) {
  const VdpInstance& inst = *p.inst;
  Evaluation ev;
  if (shares.size() != p.k) {
    ev.violation = "share count does not match path count";
    return ev;
  }
  Sat sum = 0;
  for (const Sat s : shares) {
    if (s < 0) {
      ev.violation = "negative share";
      return ev;
    }
    sum += s;
  }
  if (sum != inst.payment_value) {
    ev.violation = "shares do not sum to the payment value";
    return ev;
  }
  std::vector<Sat> share_load(p.dep.size(), 0);
  std::vector<Sat> forward_load(p.dep.size(), 0);
  for (std::size_t i = 0; i < p.k; ++i) {
    if (shares[i] == 0) continue;
    const auto amounts = forwarded_amounts(inst.paths[i], shares[i]);
    ev.fees += amounts.front() - shares[i];
    for (std::size_t h = 0; h < amounts.size(); ++h) {
      share_load[p.hop_link[i][h]] += shares[i];
      forward_load[p.hop_link[i][h]] += amounts[h];
    }
  }
  bool any = false;
  for (std::size_t l = 0; l < p.dep.size(); ++l) {
    if (share_load[l] == 0) continue;
    if (forward_load[l] > p.dep[l] - 1) {
      ev.violation = "forwarded amount reaches the deposit of a hop";
      return ev;
    }
    const Ratio mu{share_load[l], p.dep[l]};
    if (inst.threshold_mode == ThresholdMode::Upper && inst.threshold < mu) {
      ev.violation = "hop congestion above threshold";
      return ev;
    }
    if (!any || ev.mu < mu) ev.mu = mu;
    any = true;
  }
  if (ev.fees > inst.fee_budget) {
    ev.violation = "fees exceed the budget";
    return ev;
  }
  if (inst.threshold_mode == ThresholdMode::Lower) {
    for (std::size_t i = 0; i < p.k; ++i) {
      if (shares[i] == 0) continue;
      for (const int l : p.hop_link[i]) {
        if (Ratio{share_load[l], p.dep[l]} < inst.threshold) {
          ev.violation = "hop congestion below threshold";
          return ev;
        }
      }
    }
  }
  ev.feasible = true;
  return ev;
}

struct Node {
  std::vector<Sat> lo;
  std::vector<Sat> hi;
  std::vector<char> ylo;
  std::vector<char> yhi;
};

class BranchAndBound {
 public:
  BranchAndBound(const Prepared& p, const VdpOptions& options) : p_(p), options_(options) {
    const VdpInstance& inst = *p.inst;
    Sat worst_fees = 0;
    for (std::size_t i = 0; i < p.k; ++i) worst_fees += path_fee(inst.paths[i], p.share_cap[i]);
    fee_row_ = worst_fees > inst.fee_budget;
    y_matters_.assign(p.k, 0);
    for (std::size_t i = 0; i < p.k; ++i) {
      y_matters_[i] = inst.threshold_mode == ThresholdMode::Lower ||
                      (fee_row_ && (p.base_sum[i] > 0 || p.floor_slack[i] > 0.0));
    }
    theta_ = inst.threshold.to_double();
  }

  VdpSolution run() {
    Node root;
    root.lo.assign(p_.k, 0);
    root.hi = p_.share_cap;
    root.ylo.assign(p_.k, 0);
    root.yhi.assign(p_.k, 1);
    std::vector<Node> stack;
    stack.push_back(std::move(root));
    bool exhausted = true;
    bool first = true;
    double root_bound = 0.0;
    while (!stack.empty()) {
      if (explored_ >= options_.node_budget) {
        exhausted = false;
        break;
      }
      Node node = std::move(stack.back());
      stack.pop_back();
      ++explored_;
      lp::Result relax = solve_relaxation(node);
      if (first) {
        first = false;
        if (relax.status != lp::Status::Optimal) break;
        root_bound = relax.objective;
      }
      if (relax.status != lp::Status::Optimal) continue;
      if (dominated(relax.objective)) continue;
      const auto x = std::span<const double>(relax.values).subspan(0, p_.k);
      const auto y = std::span<const double>(relax.values).subspan(p_.k, p_.k);

      auto candidate = round_within(node, x);
      if (candidate) {
        const Evaluation ev = evaluate(p_, *candidate);
        if (ev.feasible && (!best_ || ev.mu < best_mu_)) {
          best_ = std::move(candidate);
          best_mu_ = ev.mu;
          best_fees_ = ev.fees;
        }
        if (dominated(relax.objective)) continue;
      }
      branch(node, x, y, stack);
    }
    if (!best_) throw Error(ErrorCode::NoFeasibleSplit, "no integer split satisfies every constraint");
    VdpSolution sol;
    sol.shares = *best_;
    sol.network_congestion = best_mu_;
    sol.total_fees = best_fees_;
    sol.active_path_count =
        static_cast<std::size_t>(std::count_if(sol.shares.begin(), sol.shares.end(), [](Sat s) { return s > 0; }));
    sol.proven_optimal = exhausted;
    sol.lower_bound = root_bound;
    sol.nodes_explored = explored_;
    return sol;
  }

 private:
  bool dominated(double bound) const {
    if (!best_) return false;
    const double incumbent = best_mu_.to_double();
    const double slack = std::max(1e-12 * std::max(1.0, incumbent), options_.relative_gap * incumbent);
    return bound >= incumbent - slack;
  }

  lp::Result solve_relaxation(const Node& node) const {
    const VdpInstance& inst = *p_.inst;
    const std::size_t k = p_.k;
    lp::Problem lp;
    for (std::size_t i = 0; i < k; ++i) {
      lp.add_variable(static_cast<double>(node.lo[i]), static_cast<double>(node.hi[i]), 0.0);
    }
    for (std::size_t i = 0; i < k; ++i) {
      const double ylo = std::max<double>(node.ylo[i], node.lo[i] > 0 ? 1.0 : 0.0);
      const double yhi = node.hi[i] == 0 ? 0.0 : node.yhi[i];
      lp.add_variable(ylo, yhi, 0.0);
    }
    const int mu = lp.add_variable(0.0, inst.threshold_mode == ThresholdMode::Upper ? theta_ : lp::kInfinity, 1.0);
    auto xv = [](std::size_t i) { return static_cast<int>(i); };
    auto yv = [k](std::size_t i) { return static_cast<int>(k + i); };

    std::vector<std::pair<int, double>> sum;
    for (std::size_t i = 0; i < k; ++i) sum.emplace_back(xv(i), 1.0);
    lp.add_row(std::move(sum), lp::Sense::Equal, static_cast<double>(inst.payment_value));

    for (std::size_t i = 0; i < k; ++i) {
      if (node.hi[i] == 0) continue;
      lp.add_row({{xv(i), 1.0}, {yv(i), -static_cast<double>(node.hi[i])}}, lp::Sense::LessEqual, 0.0);
      lp.add_row({{yv(i), 1.0}, {xv(i), -1.0}}, lp::Sense::LessEqual, 0.0);
    }

    // Congestion rows. A link used by one path only contributes its tightest
    // deposit; shared links aggregate the shares and forwarded base fees.
    std::vector<Sat> private_dep(k, 0);
    for (std::size_t l = 0; l < p_.dep.size(); ++l) {
      const auto& users = p_.link_paths[l];
      const double dep = static_cast<double>(p_.dep[l]);
      if (users.size() == 1) {
        Sat& d = private_dep[users[0]];
        d = d == 0 ? p_.dep[l] : std::min(d, p_.dep[l]);
        continue;
      }
      std::vector<std::pair<int, double>> load;
      std::vector<std::pair<int, double>> forward;
      for (const int i : users) {
        load.emplace_back(xv(i), 1.0);
        Sat base = 0;
        for (std::size_t h = 0; h < p_.hop_link[i].size(); ++h) {
          if (p_.hop_link[i][h] == static_cast<int>(l)) base += p_.base_down[i][h];
        }
        forward.emplace_back(xv(i), 1.0);
        if (base > 0) forward.emplace_back(yv(i), static_cast<double>(base));
      }
      load.emplace_back(mu, -dep);
      lp.add_row(std::move(load), lp::Sense::LessEqual, 0.0);
      lp.add_row(std::move(forward), lp::Sense::LessEqual, dep - 1.0);
      if (inst.threshold_mode == ThresholdMode::Lower) {
        for (const int i : users) {
          std::vector<std::pair<int, double>> row;
          for (const int j : users) row.emplace_back(xv(j), 1.0);
          row.emplace_back(yv(i), -theta_ * dep);
          lp.add_row(std::move(row), lp::Sense::GreaterEqual, 0.0);
        }
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (private_dep[i] == 0) continue;
      lp.add_row({{xv(i), 1.0}, {mu, -static_cast<double>(private_dep[i])}}, lp::Sense::LessEqual, 0.0);
      if (inst.threshold_mode == ThresholdMode::Lower) {
        // Every private hop must reach the threshold; the largest deposit binds.
        Sat largest = 0;
        for (const int l : p_.hop_link[i]) {
          if (p_.link_paths[l].size() == 1) largest = std::max(largest, p_.dep[l]);
        }
        lp.add_row({{xv(i), 1.0}, {yv(i), -theta_ * static_cast<double>(largest)}}, lp::Sense::GreaterEqual, 0.0);
      }
    }

    if (fee_row_) {
      std::vector<std::pair<int, double>> fees;
      for (std::size_t i = 0; i < k; ++i) {
        if (node.hi[i] == 0) continue;
        if (p_.base_sum[i] > 0) fees.emplace_back(yv(i), static_cast<double>(p_.base_sum[i]));
        if (p_.rate_sum[i] > 0.0) {
          const int t = lp.add_variable(0.0, lp::kInfinity, 0.0);
          fees.emplace_back(t, 1.0);
          lp.add_row({{xv(i), p_.rate_sum[i]}, {yv(i), -p_.floor_slack[i]}, {t, -1.0}}, lp::Sense::LessEqual, 0.0);
        }
      }
      if (!fees.empty()) lp.add_row(std::move(fees), lp::Sense::LessEqual, static_cast<double>(inst.fee_budget));
    }
    return lp.minimize();
  }

  /// Largest-remainder rounding of x inside the node's integer bounds.
  std::optional<std::vector<Sat>> round_within(const Node& node, std::span<const double> x) const {
    const Sat total = p_.inst->payment_value;
    std::vector<Sat> out(p_.k);
    std::vector<std::pair<double, std::size_t>> remainder;
    Sat assigned = 0;
    for (std::size_t i = 0; i < p_.k; ++i) {
      const double v = std::clamp(x[i], static_cast<double>(node.lo[i]), static_cast<double>(node.hi[i]));
      Sat f = static_cast<Sat>(std::floor(v + 1e-7));
      f = std::clamp(f, node.lo[i], node.hi[i]);
      if (node.yhi[i] == 0) f = 0;
      out[i] = f;
      assigned += f;
      remainder.emplace_back(v - static_cast<double>(f), i);
    }
    std::stable_sort(remainder.begin(), remainder.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    Sat missing = total - assigned;
    while (missing > 0) {
      bool moved = false;
      for (const auto& [rem, i] : remainder) {
        if (missing == 0) break;
        if (out[i] < node.hi[i] && node.yhi[i] != 0) {
          ++out[i];
          --missing;
          moved = true;
        }
      }
      if (!moved) return std::nullopt;
    }
    while (missing < 0) {
      bool moved = false;
      for (auto it = remainder.rbegin(); it != remainder.rend() && missing < 0; ++it) {
        const std::size_t i = it->second;
        if (out[i] > node.lo[i]) {
          --out[i];
          ++missing;
          moved = true;
        }
      }
      if (!moved) return std::nullopt;
    }
    for (std::size_t i = 0; i < p_.k; ++i) {
      if (node.ylo[i] == 1 && out[i] == 0) return std::nullopt;
    }
    return out;
  }

  void branch(const Node& node, std::span<const double> x, std::span<const double> y, std::vector<Node>& stack) const {
    constexpr double kTol = 1e-6;
    // Path activation first.
    int pick = -1;
    double frac_best = kTol;
    for (std::size_t i = 0; i < p_.k; ++i) {
      if (!y_matters_[i] || node.ylo[i] == node.yhi[i]) continue;
      const double frac = std::min(y[i], 1.0 - y[i]);
      if (frac > frac_best) {
        frac_best = frac;
        pick = static_cast<int>(i);
      }
    }
    if (pick >= 0) {
      Node off = node;
      off.yhi[pick] = 0;
      off.hi[pick] = 0;
      Node on = node;
      on.ylo[pick] = 1;
      on.lo[pick] = std::max<Sat>(on.lo[pick], 1);
      // Explore the side nearer the relaxation first: pushed last.
      if (y[pick] >= 0.5) {
        stack.push_back(std::move(off));
        stack.push_back(std::move(on));
      } else {
        stack.push_back(std::move(on));
        stack.push_back(std::move(off));
      }
      return;
    }
    pick = -1;
    frac_best = kTol;
    for (std::size_t i = 0; i < p_.k; ++i) {
      if (node.lo[i] == node.hi[i]) continue;
      const double frac = x[i] - std::floor(x[i]);
      const double dist = std::min(frac, 1.0 - frac);
      if (dist > frac_best) {
        frac_best = dist;
        pick = static_cast<int>(i);
      }
    }
    if (pick >= 0) {
      const Sat f = static_cast<Sat>(std::floor(x[pick]));
      Node down = node;
      down.hi[pick] = std::min(down.hi[pick], f);
      Node up = node;
      up.lo[pick] = std::max(up.lo[pick], f + 1);
      if (x[pick] - static_cast<double>(f) >= 0.5) {
        stack.push_back(std::move(down));
        stack.push_back(std::move(up));
      } else {
        stack.push_back(std::move(up));
        stack.push_back(std::move(down));
      }
      return;
    }
    // Integral relaxation whose rounding failed the exact check: fix one free
    // share at its value and exclude it on both sides.
    pick = -1;
    double largest = -1.0;
    for (std::size_t i = 0; i < p_.k; ++i) {
      if (node.lo[i] == node.hi[i]) continue;
      if (x[i] > largest) {
        largest = x[i];
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) return;
    const Sat v = std::clamp(static_cast<Sat>(std::llround(x[pick])), node.lo[pick], node.hi[pick]);
    if (v > node.lo[pick]) {
      Node below = node;
      below.hi[pick] = v - 1;
      stack.push_back(std::move(below));
    }
    if (v < node.hi[pick]) {
      Node above = node;
      above.lo[pick] = v + 1;
      stack.push_back(std::move(above));
    }
    Node fixed = node;
    fixed.lo[pick] = v;
    fixed.hi[pick] = v;
    stack.push_back(std::move(fixed));
  }

  const Prepared& p_;
  VdpOptions options_;
  bool fee_row_ = false;
  std::vector<char> y_matters_;
  double theta_ = 1.0;
  std::size_t explored_ = 0;
  std::optional<std::vector<Sat>> best_;
  Ratio best_mu_;
  Sat best_fees_ = 0;
};

}  // namespace

Ratio network_congestion(const VdpInstance& instance, std::span<const Sat> shares) {
  std::map<std::uint64_t, std::pair<Sat, Sat>> links;  // link -> (load, deposit)
  bool any = false;
  for (std::size_t i = 0; i < instance.paths.size() && i < shares.size(); ++i) {
    if (shares[i] <= 0) continue;
    any = true;
    for (const auto& hop : instance.paths[i].hops) {
      auto [it, inserted] = links.emplace(hop.link, std::pair<Sat, Sat>{0, hop.deposit});
      it->second.first += shares[i];
      it->second.second = std::min(it->second.second, hop.deposit);
    }
  }
  if (!any) throw Error(ErrorCode::EmptySolution, "no active path");
  Ratio mu;
  for (const auto& [link, ld] : links) mu = std::max(mu, channel_congestion(ld.first, ld.second));
  return mu;
}

SplitCheck check_split(const VdpInstance& instance, std::span<const Sat> shares) {
  const Prepared p = prepare(instance);
  const Evaluation ev = evaluate(p, shares);
  return {ev.feasible, ev.violation, ev.fees};
}

VdpSolution solve_vdp(const VdpInstance& instance, const VdpOptions& options) {
  const Prepared p = prepare(instance);
  if (std::all_of(p.share_cap.begin(), p.share_cap.end(), [](Sat c) { return c == 0; }) ||
      std::accumulate(p.share_cap.begin(), p.share_cap.end(), Sat{0}) < instance.payment_value) {
    throw Error(ErrorCode::NoFeasibleSplit, "candidate paths cannot carry the payment");
  }
  BranchAndBound bb(p, options);
  return bb.run();
}

std::vector<Sat> guard_value_privacy(const VdpInstance& instance, std::span<const Sat> shares) {
  std::vector<Sat> out(shares.begin(), shares.end());
  const Sat value = instance.payment_value;
  if (out.size() != instance.paths.size() || std::count_if(out.begin(), out.end(), [](Sat s) { return s > 0; }) < 2) {
    return out;
  }
  const auto first_hop = [&](std::size_t i, Sat share) {
    const auto amounts = forwarded_amounts(instance.paths[i], share);
    return amounts.empty() ? share : amounts.front();
  };
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == 0 || first_hop(i, out[i]) < value) continue;
    // Largest share whose first hop stays below the value; fees are monotone.
    Sat lo = 0, hi = out[i];
    while (lo < hi) {
      const Sat mid = lo + (hi - lo + 1) / 2;
      if (first_hop(i, mid) < value) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    const Sat surplus = out[i] - lo;
    std::optional<std::vector<Sat>> best;
    Ratio best_mu;
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (j == i) continue;
      std::vector<Sat> trial = out;
      trial[i] = lo;
      trial[j] += surplus;
      if (first_hop(j, trial[j]) >= value || !check_split(instance, trial).feasible) continue;
      const Ratio mu = network_congestion(instance, trial);
      if (!best || mu < best_mu) {
        best = std::move(trial);
        best_mu = mu;
      }
    }
    if (!best) return std::vector<Sat>(shares.begin(), shares.end());
    out = std::move(*best);
  }
  return out;
}

ParticipationResult request_participation(std::span<const Route> routes, std::span<const Sat> shares,
                                          const ParticipationPolicy& policy, std::uint64_t nonce) {
  ParticipationResult result;
  for (std::size_t i = 0; i < routes.size() && i < shares.size(); ++i) {
    if (shares[i] <= 0) continue;
    const auto& hops = routes[i].hops;
    for (std::size_t j = 1; j + 1 < hops.size(); ++j) {
      const NodeId node = hops[j];
      bool agrees = std::find(policy.always_refuse.begin(), policy.always_refuse.end(), node) ==
                    policy.always_refuse.end();
      if (agrees) {
        Rng rng(mix64(policy.seed, nonce, node.value));
        agrees = rng.bernoulli(policy.accept_probability);
      }
      if (!agrees) result.refusals.push_back(node);
    }
  }
  std::sort(result.refusals.begin(), result.refusals.end());
  result.refusals.erase(std::unique(result.refusals.begin(), result.refusals.end()), result.refusals.end());
  result.accepted = result.refusals.empty();
  return result;
}

// ---------------------------------------------------------------------------
// JSON

ThresholdMode parse_threshold_mode(const std::string& text) {
  if (text == "upper") return ThresholdMode::Upper;
  if (text == "lower") return ThresholdMode::Lower;
  if (text == "off") return ThresholdMode::Off;
  throw Error(ErrorCode::BadConfig, "threshold mode must be upper, lower or off: " + text);
}

std::string to_string(ThresholdMode mode) {
  switch (mode) {
    case ThresholdMode::Upper: return "upper";
    case ThresholdMode::Lower: return "lower";
    case ThresholdMode::Off: return "off";
  }
  return "off";
}

Ratio parse_decimal_ratio(const std::string& text) {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool seen_digit = false;
  bool seen_point = false;
  for (const char c : text) {
    if (c == '.' && !seen_point) {
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') throw Error(ErrorCode::BadConfig, "not a nonnegative decimal: " + text);
    if (num > 100'000'000'000LL || (seen_point && den >= 1'000'000'000'000LL)) {
      throw Error(ErrorCode::BadConfig, "decimal has too many digits: " + text);
    }
    seen_digit = true;
    num = num * 10 + (c - '0');
    if (seen_point) den *= 10;
  }
  if (!seen_digit) throw Error(ErrorCode::BadConfig, "not a nonnegative decimal: " + text);
  const std::int64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

VdpInstance read_instance(std::istream& in) {
  using nlohmann::json;
  VdpInstance inst;
  try {
    const json doc = json::parse(in);
    inst.payment_value = doc.at("payment_value").get<Sat>();
    inst.fee_budget = doc.value("fee_budget", Sat{0});
    if (doc.contains("threshold")) {
      const auto& t = doc.at("threshold");
      inst.threshold = parse_decimal_ratio(t.is_string() ? t.get<std::string>() : t.dump());
    }
    inst.threshold_mode = parse_threshold_mode(doc.value("threshold_mode", std::string("upper")));
    std::uint64_t fresh = std::uint64_t{1} << 63;
    for (const auto& p : doc.at("paths")) {
      VdpPath path;
      for (const auto& h : p.at("hops")) {
        VdpHop hop;
        hop.link = h.contains("link") ? h.at("link").get<std::uint64_t>() : fresh++;
        hop.deposit = h.at("deposit").get<Sat>();
        hop.forwarder_fee.base_fee = h.value("base_fee", Sat{0});
        hop.forwarder_fee.fee_rate_ppm = h.value("fee_rate_ppm", std::int64_t{0});
        path.hops.push_back(hop);
      }
      inst.paths.push_back(std::move(path));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInstance, e.what());
  }
  return inst;
}

void write_instance(const VdpInstance& instance, std::ostream& out) {
  using nlohmann::json;
  json doc;
  doc["payment_value"] = instance.payment_value;
  doc["fee_budget"] = instance.fee_budget;
  doc["threshold"] = instance.threshold.to_double();
  doc["threshold_mode"] = to_string(instance.threshold_mode);
  json paths = json::array();
  for (const auto& p : instance.paths) {
    json hops = json::array();
    for (const auto& h : p.hops) {
      hops.push_back({{"link", h.link},
                      {"deposit", h.deposit},
                      {"base_fee", h.forwarder_fee.base_fee},
                      {"fee_rate_ppm", h.forwarder_fee.fee_rate_ppm}});
    }
    paths.push_back({{"hops", std::move(hops)}});
  }
  doc["paths"] = std::move(paths);
  out << doc.dump(1) << '\n';
}

void write_solution(const VdpInstance& instance, const VdpSolution& solution, std::ostream& out) {
  using nlohmann::json;
  json doc;
  doc["shares"] = solution.shares;
  json fees = json::array();
  for (std::size_t i = 0; i < solution.shares.size(); ++i) fees.push_back(path_fee(instance.paths[i], solution.shares[i]));
  doc["path_fees"] = std::move(fees);
  doc["network_congestion"] = {{"num", solution.network_congestion.num},
                               {"den", solution.network_congestion.den},
                               {"value", solution.network_congestion.to_double()}};
  doc["total_fees"] = solution.total_fees;
  doc["active_path_count"] = solution.active_path_count;
  doc["proven_optimal"] = solution.proven_optimal;
  out << doc.dump(1) << '\n';
}

}  // namespace rapido
