#include <benchmark/benchmark.h>

#include "hsr/evaluator.hpp"
#include "hsr/game.hpp"
#include "hsr/mcts.hpp"

using namespace hsr;

static void BM_SearchOracle(benchmark::State& state) {
  GameState root = refutation_state(2, 6, 22, PlayerId::First);
  OracleEvaluator eval(23);
  SearchConfig cfg;
  cfg.simulations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SearchResult res = search(root, eval, cfg);
    benchmark::DoNotOptimize(res.argmax_index);
  }
  state.SetItemsProcessed(state.iterations() * cfg.simulations);
}
BENCHMARK(BM_SearchOracle)->Arg(50)->Arg(200);

static void BM_SearchUniform(benchmark::State& state) {
  GameState root = refutation_state(2, 6, 22, PlayerId::First);
  UniformEvaluator eval(23);
  SearchConfig cfg;
  cfg.simulations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SearchResult res = search(root, eval, cfg);
    benchmark::DoNotOptimize(res.argmax_index);
  }
  state.SetItemsProcessed(state.iterations() * cfg.simulations);
}
BENCHMARK(BM_SearchUniform)->Arg(50)->Arg(200);

static void BM_SearchSharedTree(benchmark::State& state) {
  GameState root = refutation_state(2, 6, 22, PlayerId::First);
  UniformEvaluator eval(23);
  SearchConfig cfg;
  cfg.simulations = 50;
  SearchTree tree;
  for (auto _ : state) {
    SearchResult res = search(root, eval, cfg, &tree);
    benchmark::DoNotOptimize(res.argmax_index);
  }
}
BENCHMARK(BM_SearchSharedTree);

static void BM_EvaluateLeaf(benchmark::State& state) {
  GameState s = refutation_state(2, 6, 22, PlayerId::First);
  OracleEvaluator eval(23);
  for (auto _ : state) {
    LeafEvaluation leaf = evaluate_leaf(s, eval);
    benchmark::DoNotOptimize(leaf.value);
  }
}
BENCHMARK(BM_EvaluateLeaf);

BENCHMARK_MAIN();
