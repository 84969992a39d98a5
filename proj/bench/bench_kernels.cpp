// Serial reference against the OpenMP kernels on desk-sized inputs.
#include <benchmark/benchmark.h>

#include "regx/datasets.hpp"
#include "regx/explainers.hpp"
#include "regx/gnn.hpp"
#include "regx/kernels.hpp"

using namespace regx;

namespace {

kernels::Exec exec_of(const benchmark::State& state) {
  return state.range(0) ? kernels::Exec::parallel : kernels::Exec::serial;
}

const GraphDataset& counting() {
  static const GraphDataset ds = [] {
    datasets::GenConfig gc;
    gc.n_graphs = 200;
    return datasets::generate(datasets::kBaMotifCounting, gc);
  }();
  return ds;
}

const GcnModel& model() {
  static const GcnModel m = GcnModel::initialized(counting().graphs[0].feature_dim(), 64,
                                                  Readout::mean, 1);
  return m;
}

void BM_BatchEmbed(benchmark::State& state) {
  std::vector<const Graph*> gs;
  for (const auto& g : counting().graphs) gs.push_back(&g);
  const std::vector<const EdgeMask*> masks(gs.size(), nullptr);
  for (auto _ : state) {
    benchmark::DoNotOptimize(batch_embed(model(), gs, masks, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(gs.size()));
}
BENCHMARK(BM_BatchEmbed)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RegExplainerEpoch(benchmark::State& state) {
  auto cfg = explain::default_config(explain::Kind::regexplainer);
  cfg.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(explain::train_pg_family(model(), counting(), cfg, exec_of(state)));
  }
}
BENCHMARK(BM_RegExplainerEpoch)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ExplainTestSplit(benchmark::State& state) {
  auto cfg = explain::default_config(explain::Kind::gnnexplainer);
  cfg.epochs = 20;
  const auto& targets = counting().splits.explainer_test;
  for (auto _ : state) {
    benchmark::DoNotOptimize(explain::run_explainer(model(), counting(), cfg, targets,
                                                    exec_of(state)));
  }
}
BENCHMARK(BM_ExplainTestSplit)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Generators always run through parallel_for; one worker is the serial baseline.
void BM_GenerateTriangles(benchmark::State& state) {
  kernels::set_worker_count(state.range(0) ? 0 : 1);
  datasets::GenConfig gc;
  gc.n_graphs = 500;
  for (auto _ : state) {
    benchmark::DoNotOptimize(datasets::generate(datasets::kTriangles, gc));
  }
  kernels::set_worker_count(0);
}
BENCHMARK(BM_GenerateTriangles)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
