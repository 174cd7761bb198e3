#include <benchmark/benchmark.h>

#include "ecfsfdp/pipeline.hpp"
#include "fixtures.hpp"

using namespace ecfsfdp;

namespace {

PointSet blobs(std::size_t n) {
  return PointSet::from_rows(fixtures::random_blobs(7, n, 8));
}

void BM_Distances(benchmark::State& state) {
  const auto points = blobs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_distance(points));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Distances)->Arg(1000)->Arg(2000)->Arg(4000)->Arg(8000)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

void BM_ResolveDc(benchmark::State& state) {
  const auto dm = pairwise_distance(blobs(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(resolve_dc(dm, DcSpec::max_rho_percent(2.0)));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ResolveDc)->Arg(1000)->Arg(2000)->Arg(4000)->Arg(8000)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

// Density, delta/parent, default center count and assignment at a fixed cutoff.
void BM_PhaseOne(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Session session(blobs(n));
  const double dc = session.resolve(DcSpec::max_rho_percent(2.0));
  for (auto _ : state) {
    const auto profile = compute_profile(session.distances(), dc);
    const auto graph = decision_graph(profile);
    benchmark::DoNotOptimize(
        assign(profile, select_centers_auto(graph, default_center_count(graph, 2)),
               session.distances()));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PhaseOne)->Arg(1000)->Arg(2000)->Arg(4000)->Arg(8000)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

void BM_KnnMatrix(benchmark::State& state) {
  const auto dm = pairwise_distance(blobs(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(knn_graph(dm, 30));
}
BENCHMARK(BM_KnnMatrix)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_KnnKdTree(benchmark::State& state) {
  const auto points = blobs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(knn_graph_kdtree(points, 30));
}
BENCHMARK(BM_KnnKdTree)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

// Phase II from a fixed Phase I partition with `range(1)` initial clusters.
void BM_Merge(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  Session session(blobs(n));
  const double dc = session.resolve(DcSpec::max_rho_percent(2.0));
  CenterChoice choice;
  choice.auto_count = m;
  const auto initial = session.phase_one(dc, choice, 2).labeling;
  const auto graph = session.graph(30);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        merge_loop(initial, graph, session.distances(), {dc, 2.0, Termination::target_count(2)}));
}
BENCHMARK(BM_Merge)->Args({4000, 20})->Args({4000, 80})->Args({8000, 40})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
