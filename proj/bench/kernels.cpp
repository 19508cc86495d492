// Serial reference kernels against the OpenMP ones. The second argument of
// the parallel benchmarks is the worker count.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "hinrec/baselines.hpp"
#include "hinrec/dmf.hpp"
#include "hinrec/expansion.hpp"
#include "hinrec/reference.hpp"
#include "hinrec/sampling.hpp"
#include "hinrec/synthetic.hpp"

using namespace hinrec;

namespace {

struct Fixture {
  HeteroGraph g;
  ResolvedMetaPath path;
  std::vector<NodeIndex> starts;
  BipartiteRatings ratings;
};

// A shrunken timing-high graph: 400 users, 3-step path through actors.
const Fixture& fixture() {
  static const Fixture f = [] {
    auto spec = synthetic_preset("timing-high");
    spec.nodes[0].count = 400;
    const auto data = generate_synthetic(spec);
    Fixture x;
    x.g = load_graph(data.schema, data.records);
    x.path = resolve_metapath(spec.metapaths.front(), x.g.schema());
    x.starts = all_starts(x.g, x.path);
    x.ratings = BipartiteRatings::from_relation(direct_relation(x.g, x.g.schema().edge_type_id("um")));
    return x;
  }();
  return f;
}

void BM_ExpandReference(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(reference::expand_full(f.g, f.path, f.starts));
}

void BM_ExpandParallel(benchmark::State& state) {
  const auto& f = fixture();
  const ExpandOptions opts{2e8, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(expand_full(f.g, f.path, f.starts, opts));
}

void BM_SampleReference(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(reference::sample_relation(f.g, f.path, f.starts, {100, 5}, 1));
}

void BM_SampleParallel(benchmark::State& state) {
  const auto& f = fixture();
  const ParallelOptions par{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(sample_relation(f.g, f.path, f.starts, {100, 5}, 1, par));
}

void BM_P3(benchmark::State& state) {
  const auto& f = fixture();
  const ParallelOptions par{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(baseline_topk(f.ratings, Algorithm::p3, {}, 10, par));
}

void worker_counts(benchmark::internal::Benchmark* b) {
  const int max = omp_get_num_procs();
  for (int w = 1; w <= max; w *= 2) b->Arg(w);
  if (max & (max - 1)) b->Arg(max);
}

}  // namespace

BENCHMARK(BM_ExpandReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExpandParallel)->Apply(worker_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SampleReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleParallel)->Apply(worker_counts)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_P3)->Apply(worker_counts)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
