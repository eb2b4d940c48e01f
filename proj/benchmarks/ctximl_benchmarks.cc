#include <benchmark/benchmark.h>

#include "ctximl/feature_effects.h"
#include "ctximl/reference_predictor.h"
#include "ctximl/shapley.h"
#include "ctximl/surrogate.h"
#include "ctximl/synth.h"

namespace {

using namespace ctximl;

Dataset Data(Eigen::Index n, Eigen::Index p) {
  return SynthGenerate({.n = n, .p = p, .task = SynthTask::kGaussianClusters, .seed = 7});
}

void BM_ReferencePredict(benchmark::State& state) {
  const Dataset train = Data(state.range(0), 10);
  const Dataset queries = Data(200, 10);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ReferencePredict(train.features(), train.labels(), queries.features(), 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 200);
}
BENCHMARK(BM_ReferencePredict)->Arg(100)->Arg(400)->Arg(800);

void PdBenchmark(benchmark::State& state, bool batched) {
  const Dataset train = Data(800, 10);
  const Dataset inference = Data(200, 10);
  const GridSpec grid =
      BuildGrid(inference.features().col(0), static_cast<int>(state.range(0)), GridStrategy::kUniform);
  const ReferencePredictor predictor;
  for (auto _ : state) {
    if (batched)
      benchmark::DoNotOptimize(PartialDependence(predictor, train, inference.features(), grid));
    else
      benchmark::DoNotOptimize(PartialDependenceNaive(predictor, train, inference.features(), grid));
  }
}
void BM_PdBatched(benchmark::State& state) { PdBenchmark(state, true); }
void BM_PdNaive(benchmark::State& state) { PdBenchmark(state, false); }
BENCHMARK(BM_PdBatched)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PdNaive)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_KernelShapExhaustive(benchmark::State& state) {
  const auto p = static_cast<int>(state.range(0));
  const Dataset train = Data(64, p);
  const Dataset inference = Data(8, p);
  const ReferencePredictor predictor;
  KernelShapOptions options;
  options.num_coalitions = (1 << p) - 2;
  for (auto _ : state)
    benchmark::DoNotOptimize(KernelShap(predictor, train, inference.features(), options));
}
BENCHMARK(BM_KernelShapExhaustive)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

void BM_SurrogateSolve(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const CoalitionPlan plan = PlanCoalitions(p, 4 * p, 3);
  Matrix design(plan.coalitions.size(), p);
  for (std::size_t m = 0; m < plan.coalitions.size(); ++m)
    for (int j = 0; j < p; ++j) design(static_cast<Eigen::Index>(m), j) = plan.coalitions[m][std::size_t(j)];
  const Matrix values = design * Matrix::Ones(p, 128) * 0.1;
  const Vector v_empty = Vector::Zero(128);
  const Vector v_full = Vector::Constant(128, 0.1 * p);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        SolveWeightedSurrogate(design, plan.weights, values, v_empty, v_full));
}
BENCHMARK(BM_SurrogateSolve)->Arg(6)->Arg(12)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
