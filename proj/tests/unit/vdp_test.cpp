#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "rapido/error.hpp"
#include "rapido/lp.hpp"
#include "rapido/vdp.hpp"

namespace rapido {
namespace {

VdpInstance fixture() {
  std::ifstream in(RAPIDO_TEST_DATA "/vdp_instance.json");
  return read_instance(in);
}

VdpPath single_hop(std::uint64_t link, Sat deposit) {
  VdpPath p;
  p.hops.push_back({link, deposit, {}});
  return p;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::IoFailure;
}

TEST(Lp, SimpleMinimum) {
  // min x + y s.t. x + 2y >= 4, x - y <= 1, 0 <= x, y.
  lp::Problem p;
  const int x = p.add_variable(0, lp::kInfinity, 1);
  const int y = p.add_variable(0, lp::kInfinity, 1);
  p.add_row({{x, 1}, {y, 2}}, lp::Sense::GreaterEqual, 4);
  p.add_row({{x, 1}, {y, -1}}, lp::Sense::LessEqual, 1);
  const lp::Result r = p.minimize();
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-9);
  EXPECT_NEAR(r.values[y], 2.0, 1e-9);
}

TEST(Lp, InfeasibleAndUnbounded) {
  lp::Problem a;
  const int x = a.add_variable(0, 1, 1);
  a.add_row({{x, 1}}, lp::Sense::GreaterEqual, 2);
  EXPECT_EQ(a.minimize().status, lp::Status::Infeasible);

  lp::Problem b;
  const int y = b.add_variable(-lp::kInfinity, lp::kInfinity, 1);
  b.add_row({{y, 1}}, lp::Sense::LessEqual, 3);
  EXPECT_EQ(b.minimize().status, lp::Status::Unbounded);
}

TEST(Lp, EqualityRowsAndBounds) {
  lp::Problem p;
  const int x = p.add_variable(1, 5, -1);
  const int y = p.add_variable(0, 5, 2);
  p.add_row({{x, 1}, {y, 1}}, lp::Sense::Equal, 7);
  const lp::Result r = p.minimize();
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_NEAR(r.values[x], 5.0, 1e-9);
  EXPECT_NEAR(r.values[y], 2.0, 1e-9);
}

TEST(Vdp, FixtureSplitsEvenly) {
  const VdpInstance in = fixture();
  const VdpSolution s = solve_vdp(in);
  EXPECT_EQ(s.shares, (std::vector<Sat>{2, 2, 2}));
  EXPECT_EQ(s.network_congestion, (Ratio{2, 3}));
  EXPECT_EQ(s.total_fees, 0);
  EXPECT_EQ(s.active_path_count, 3u);
  EXPECT_TRUE(s.proven_optimal);
  EXPECT_LE(s.lower_bound, 2.0 / 3.0 + 1e-9);
}

TEST(Vdp, CongestionIsExactAndAggregated) {
  EXPECT_EQ(channel_congestion(2, 3), (Ratio{2, 3}));
  EXPECT_EQ(code_of([] { channel_congestion(1, 0); }), ErrorCode::ZeroDeposit);

  VdpInstance in;
  in.payment_value = 4;
  in.paths = {single_hop(7, 10), single_hop(7, 10)};
  const std::vector<Sat> shares{1, 3};
  EXPECT_EQ(network_congestion(in, shares), (Ratio{4, 10}));
  const std::vector<Sat> none{0, 0};
  EXPECT_EQ(code_of([&] { network_congestion(in, none); }), ErrorCode::EmptySolution);
}

TEST(Vdp, ForwardedAmountsCompoundBackwards) {
  VdpPath p;
  p.hops.push_back({0, 100, FeePolicy{1, 100'000}});
  p.hops.push_back({1, 100, FeePolicy{1, 100'000}});
  p.hops.push_back({2, 100, FeePolicy{9, 0}});
  // Last hop carries 10; the middle forwarder charges 1 + 1 = 2; the first 1 + 1 = 2.
  EXPECT_EQ(forwarded_amounts(p, 10), (std::vector<Sat>{14, 12, 10}));
  EXPECT_EQ(path_fee(p, 10), 4);
  EXPECT_EQ(path_fee(p, 0), 0);
}

TEST(Vdp, CheckSplitNamesTheViolation) {
  const VdpInstance in = fixture();
  EXPECT_TRUE(check_split(in, std::vector<Sat>{2, 2, 2}).feasible);
  EXPECT_FALSE(check_split(in, std::vector<Sat>{2, 2, 1}).feasible);
  const SplitCheck full = check_split(in, std::vector<Sat>{3, 3, 0});
  EXPECT_FALSE(full.feasible);
  EXPECT_NE(full.violation.find("deposit"), std::string::npos);
  EXPECT_FALSE(check_split(in, std::vector<Sat>{-1, 4, 3}).feasible);
  EXPECT_FALSE(check_split(in, std::vector<Sat>{6}).feasible);
}

TEST(Vdp, LowerThresholdRejectsLightLoads) {
  VdpInstance in;
  in.payment_value = 4;
  in.paths = {single_hop(0, 10), single_hop(1, 10)};
  in.threshold = {3, 10};
  in.threshold_mode = ThresholdMode::Lower;
  EXPECT_FALSE(check_split(in, std::vector<Sat>{2, 2}).feasible);
  const VdpSolution s = solve_vdp(in);
  EXPECT_EQ(s.active_path_count, 1u);
  EXPECT_EQ(s.network_congestion, (Ratio{4, 10}));
}

TEST(Vdp, FeeBudgetBinds) {
  VdpInstance in;
  in.payment_value = 10;
  VdpPath paid;
  paid.hops.push_back({0, 100, FeePolicy{5, 0}});
  paid.hops.push_back({1, 100, {}});
  in.paths = {paid, single_hop(2, 11)};
  in.fee_budget = 0;
  EXPECT_EQ(solve_vdp(in).shares, (std::vector<Sat>{0, 10}));
  in.fee_budget = 5;
  const VdpSolution s = solve_vdp(in);
  EXPECT_EQ(s.shares, (std::vector<Sat>{9, 1}));
  EXPECT_EQ(s.total_fees, 5);
  EXPECT_EQ(s.network_congestion, (Ratio{1, 11}));
}

TEST(Vdp, Errors) {
  VdpInstance in;
  in.payment_value = 5;
  EXPECT_EQ(code_of([&] { solve_vdp(in); }), ErrorCode::InvalidInstance);
  in.paths = {single_hop(0, 3)};
  EXPECT_EQ(code_of([&] { solve_vdp(in); }), ErrorCode::NoFeasibleSplit);
  in.payment_value = 0;
  EXPECT_EQ(code_of([&] { solve_vdp(in); }), ErrorCode::InvalidInstance);
}

TEST(Vdp, MatchesBruteForceOnRandomInstances) {
  Rng rng(20240601);
  std::size_t feasible = 0;
  for (int i = 0; i < 150; ++i) {
    const VdpInstance in = testing::random_vdp_instance(rng, 3, 3, 40);
    const auto expected = testing::brute_force_vdp(in);
    if (!expected) {
      EXPECT_EQ(code_of([&] { solve_vdp(in); }), ErrorCode::NoFeasibleSplit) << "instance " << i;
      continue;
    }
    ++feasible;
    const VdpSolution s = solve_vdp(in);
    EXPECT_TRUE(check_split(in, s.shares).feasible) << "instance " << i;
    EXPECT_TRUE(testing::frac_equal({s.network_congestion.num, s.network_congestion.den}, *expected))
        << "instance " << i;
  }
  EXPECT_GT(feasible, 40u);
}

TEST(Vdp, PrivacyGuardTrimsDominantShare) {
  VdpInstance in;
  in.payment_value = 10;
  in.fee_budget = 5;
  VdpPath a;
  a.hops.push_back({0, 100, FeePolicy{1, 0}});
  a.hops.push_back({1, 100, {}});
  in.paths = {a, single_hop(2, 10)};
  // Path a's first hop would carry 9 + 1 = 10, the full value.
  EXPECT_EQ(guard_value_privacy(in, std::vector<Sat>{9, 1}), (std::vector<Sat>{8, 2}));
  // A single active share is left alone.
  EXPECT_EQ(guard_value_privacy(in, std::vector<Sat>{10, 0}), (std::vector<Sat>{10, 0}));
  EXPECT_EQ(guard_value_privacy(in, std::vector<Sat>{5, 5}), (std::vector<Sat>{5, 5}));
}

TEST(Vdp, PrivacyGuardKeepsSharesWhenNoRepairFits) {
  VdpInstance in;
  in.payment_value = 10;
  in.fee_budget = 5;
  VdpPath a;
  a.hops.push_back({0, 100, FeePolicy{1, 0}});
  a.hops.push_back({1, 100, {}});
  in.paths = {a, single_hop(2, 2)};
  EXPECT_EQ(guard_value_privacy(in, std::vector<Sat>{9, 1}), (std::vector<Sat>{9, 1}));
}

TEST(Vdp, ParticipationIsDeterministic) {
  const std::vector<Route> routes{{{NodeId{0}, NodeId{1}, NodeId{2}}, {ChannelId{0}, ChannelId{1}}},
                                  {{NodeId{0}, NodeId{3}, NodeId{2}}, {ChannelId{2}, ChannelId{3}}}};
  const std::vector<Sat> shares{1, 1};
  ParticipationPolicy yes;
  EXPECT_TRUE(request_participation(routes, shares, yes, 1).accepted);

  ParticipationPolicy stubborn;
  stubborn.always_refuse = {NodeId{3}, NodeId{0}};
  const auto r = request_participation(routes, shares, stubborn, 1);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.refusals, (std::vector<NodeId>{NodeId{3}}));
  const std::vector<Sat> only_first{2, 0};
  EXPECT_TRUE(request_participation(routes, only_first, stubborn, 1).accepted);

  ParticipationPolicy coin;
  coin.accept_probability = 0.5;
  coin.seed = 9;
  for (std::uint64_t nonce = 0; nonce < 20; ++nonce) {
    EXPECT_EQ(request_participation(routes, shares, coin, nonce).refusals,
              request_participation(routes, shares, coin, nonce).refusals);
  }
}

TEST(Vdp, InstanceJsonRoundTrip) {
  const VdpInstance in = fixture();
  std::ostringstream out;
  write_instance(in, out);
  std::istringstream back_in(out.str());
  const VdpInstance back = read_instance(back_in);
  std::ostringstream again;
  write_instance(back, again);
  EXPECT_EQ(out.str(), again.str());
  EXPECT_EQ(back.threshold, (Ratio{95, 100}));

  std::istringstream bad("{\"paths\": 3}");
  EXPECT_EQ(code_of([&] { read_instance(bad); }), ErrorCode::InvalidInstance);
}

TEST(Vdp, DecimalRatios) {
  EXPECT_EQ(parse_decimal_ratio("0.95"), (Ratio{19, 20}));
  EXPECT_EQ(parse_decimal_ratio("1"), (Ratio{1, 1}));
  EXPECT_EQ(parse_decimal_ratio("0.01"), (Ratio{1, 100}));
  EXPECT_EQ(parse_threshold_mode("lower"), ThresholdMode::Lower);
  EXPECT_EQ(to_string(ThresholdMode::Off), "off");
}

}  // namespace
}  // namespace rapido
