#include <benchmark/benchmark.h>

#include <map>

#include "swarmtopo/boundary.hpp"
#include "swarmtopo/convergetree.hpp"
#include "swarmtopo/experiment.hpp"

namespace {

using namespace swarmtopo;

// Standard region at the density of the reference deployment, scaled by n.
const netgraph::UnitDiskGraph& graph(std::size_t n) {
  static std::map<std::size_t, netgraph::UnitDiskGraph> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, experiment::build_graph(experiment::standard_region(), n, 1)).first;
  return it->second;
}

void BM_BuildUdg(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pts = geometry::sample_uniform(experiment::standard_region(), n, 1);
  const auto nodes = netgraph::assign_random_ids(pts, 2);
  for (auto _ : state) benchmark::DoNotOptimize(netgraph::build_udg(nodes));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BuildUdg)->Arg(5000)->Arg(20000)->Arg(45000)->Unit(benchmark::kMillisecond);

void BM_EchoTree(benchmark::State& state) {
  const auto& g = graph(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tree::build_tree(g));
}
BENCHMARK(BM_EchoTree)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_HistogramAggregate(benchmark::State& state) {
  const auto& g = graph(static_cast<std::size_t>(state.range(0)));
  const auto t = tree::build_tree(g);
  const auto delta = netgraph::max_degree(g);
  const auto local = tree::histogram_values(g, delta, netgraph::kDefaultBinCount);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree::aggregate(g, t.states, tree::AggregateOp::HISTOGRAM_MERGE, local));
  }
}
BENCHMARK(BM_HistogramAggregate)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto& g = graph(static_cast<std::size_t>(state.range(0)));
  const auto mu = boundary::estimate_mu(netgraph::histogram(g)).mu_est;
  for (auto _ : state) benchmark::DoNotOptimize(boundary::classify(g, boundary::threshold(0.77, mu)));
}
BENCHMARK(BM_Classify)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
