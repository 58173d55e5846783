#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rapido/error.hpp"
#include "rapido/metrics.hpp"

namespace rapido {
namespace {

SkewnessSample sample(std::uint32_t node, Ratio value) { return {NodeId{node}, ChannelId{0}, ChannelId{1}, value}; }

TEST(Metrics, NodeSkewnessExamples) {
  EXPECT_EQ(node_skewness(5, 10, 2, 0), (Ratio{8, 7}));
  EXPECT_EQ(node_skewness(5, 10, 0, 0), (Ratio{2, 1}));
  EXPECT_EQ(node_skewness(0, 100, 100, 0), (Ratio{0, 1}));
  EXPECT_EQ(node_skewness(5, 10, 2, 3), (Ratio{8, 10}));
  try {
    node_skewness(5, 10, 11, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PaymentExceedsOutbound);
  }
  try {
    node_skewness(0, 10, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDeposit);
  }
}

TEST(Metrics, SkewedRatioCountsNodesOnce) {
  const std::vector<SkewnessSample> healthy{sample(0, {1, 2}), sample(1, {1, 100})};
  EXPECT_EQ(skewed_ratio(healthy), (Ratio{0, 1}));
  const std::vector<SkewnessSample> one_of_four{sample(0, {1, 1000}), sample(1, {1, 2}), sample(2, {3, 1}),
                                                sample(3, {5, 7})};
  EXPECT_EQ(skewed_ratio(one_of_four), (Ratio{1, 4}));
  // Node 0 appears twice; its smallest value decides.
  const std::vector<SkewnessSample> repeated{sample(0, {1, 2}), sample(0, {0, 1}), sample(1, {1, 1})};
  EXPECT_EQ(skewed_ratio(repeated), (Ratio{1, 2}));
  try {
    skewed_ratio({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySampleSet);
  }
}

TEST(Metrics, SuccessRate) {
  std::vector<PaymentOutcome> outcomes(10);
  for (auto& o : outcomes) o.success = true;
  EXPECT_EQ(success_rate(outcomes), (Ratio{1, 1}));
  outcomes[3].success = false;
  EXPECT_EQ(success_rate(outcomes), (Ratio{9, 10}));
  try {
    success_rate({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyOutcomeSet);
  }
}

TEST(Metrics, FeeStats) {
  const std::vector<Sat> fees{2, 4, 4, 4, 5, 5, 7, 9};
  const FeeStats s = fee_stats(fees);
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_DOUBLE_EQ(s.stddev, 2.0);
  EXPECT_DOUBLE_EQ(fee_stats({}).mean, 0.0);
}

TEST(Metrics, TrackerSamplesTraversedDirections) {
  GraphBuilder b;
  for (const char* n : {"a", "b", "c", "d"}) b.add_node(n);
  b.add_channel("a", "b", 10, 5, 5);
  b.add_channel("b", "c", 10, 10, 0);
  b.add_channel("c", "d", 10, 0, 10);
  const ChannelGraph g = std::move(b).build();
  DirectionTracker t;
  try {
    t.skewed_ratio(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySampleSet);
  }
  t.record(make_route(g, {g.node("a"), g.node("b"), g.node("c"), g.node("d")}));
  EXPECT_EQ(t.involved_nodes(), 2u);
  const auto samples = t.sample(g);
  // b: in a-b holds 5, out b-c holds 10 -> 2. c: in b-c holds 0 -> unbounded, skipped.
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].node, g.node("b"));
  EXPECT_EQ(samples[0].value, (Ratio{2, 1}));
  EXPECT_EQ(t.skewed_ratio(g), (Ratio{0, 2}));
}

TEST(MetricsProperty, SkewedRatioBoundedAndMonotone) {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<SkewnessSample> samples;
    const auto n = 1 + rng.below(12);
    for (std::size_t i = 0; i < n; ++i) {
      samples.push_back(sample(static_cast<std::uint32_t>(rng.below(6)), {rng.between(0, 50), rng.between(1, 50)}));
    }
    Ratio previous{1, 1};
    for (std::int64_t t = 0; t <= 60; t += 3) {
      const Ratio r = skewed_ratio(samples, {t, 20});
      EXPECT_GE(r, (Ratio{0, 1}));
      EXPECT_LE(r, (Ratio{1, 1}));
      if (t > 0) {
        EXPECT_GE(r, previous);
      }
      previous = r;
    }
    const Sat z_in = rng.between(1, 1000), z_out = rng.between(0, 1000);
    EXPECT_EQ(node_skewness(z_in, z_out, 0, 0), (Ratio{z_out, z_in}));
  }
}

}  // namespace
}  // namespace rapido
