#include <benchmark/benchmark.h>

#include "rapido/beacon.hpp"
#include "rapido/error.hpp"
#include "rapido/routing.hpp"
#include "rapido/rng.hpp"
#include "rapido/topology.hpp"
#include "rapido/vdp.hpp"

namespace rapido {
namespace {

const ChannelGraph& synthetic() {
  static const ChannelGraph g = assign_deposits(generate_synthetic_graph(2681, 7347, 1));
  return g;
}

RoutingTables tables_for(std::size_t beacons) {
  const auto portions = partition_topology(synthetic(), beacons, 7);
  return proactive_update(synthetic(), elect_beacons(portions, 0, 7));
}

// Ten paths of up to five hops with some shared links, as a beacon
// candidate set would produce.
VdpInstance split_instance(std::uint64_t seed) {
  Rng rng(seed);
  VdpInstance in;
  in.payment_value = 50'000;
  in.fee_budget = 200;
  for (int i = 0; i < 10; ++i) {
    VdpPath p;
    const std::size_t hops = 2 + rng.below(4);
    for (std::size_t h = 0; h < hops; ++h) {
      const std::uint64_t link = rng.below(25);
      p.hops.push_back({link, 5'000 + static_cast<Sat>(rng.below(60'000)),
                        FeePolicy{static_cast<Sat>(rng.below(3)), static_cast<std::int64_t>(rng.below(1'000))}});
    }
    in.paths.push_back(std::move(p));
  }
  return in;
}

void bm_proactive_update(benchmark::State& state) {
  const auto beacons = static_cast<std::size_t>(state.range(0));
  const auto portions = partition_topology(synthetic(), beacons, 7);
  const BeaconEpoch epoch = elect_beacons(portions, 0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(proactive_update(synthetic(), epoch));
}
BENCHMARK(bm_proactive_update)->Arg(5)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void bm_candidate_paths(benchmark::State& state) {
  const RoutingTables t = tables_for(static_cast<std::size_t>(state.range(0)));
  Rng rng(11);
  const auto n = synthetic().node_count();
  for (auto _ : state) {
    const NodeId c{static_cast<std::uint32_t>(rng.below(n))};
    const NodeId m{static_cast<std::uint32_t>((c.value + 1 + rng.below(n - 1)) % n)};
    benchmark::DoNotOptimize(candidate_paths(synthetic(), t, c, m));
  }
}
BENCHMARK(bm_candidate_paths)->Arg(50)->Arg(200);

void bm_ln_route(benchmark::State& state) {
  Rng rng(12);
  const auto n = synthetic().node_count();
  for (auto _ : state) {
    const NodeId c{static_cast<std::uint32_t>(rng.below(n))};
    const NodeId m{static_cast<std::uint32_t>((c.value + 1 + rng.below(n - 1)) % n)};
    try {
      benchmark::DoNotOptimize(ln_route(synthetic(), c, m, 10'000));
    } catch (const Error&) {
    }
  }
}
BENCHMARK(bm_ln_route)->Unit(benchmark::kMicrosecond);

void bm_solve_vdp(benchmark::State& state) {
  std::vector<VdpInstance> instances;
  for (std::uint64_t s = 0; s < 16; ++s) instances.push_back(split_instance(s));
  std::size_t i = 0;
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(solve_vdp(instances[i++ % instances.size()]));
    } catch (const Error&) {
    }
  }
}
BENCHMARK(bm_solve_vdp)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace rapido

BENCHMARK_MAIN();
