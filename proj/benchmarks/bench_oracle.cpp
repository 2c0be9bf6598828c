#include <benchmark/benchmark.h>

#include "hsr/game.hpp"
#include "hsr/oracle.hpp"

using namespace hsr;

static void BM_Bernoulli(benchmark::State& state) {
  int k = static_cast<int>(state.range(0));
  int q = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bernoulli(k, q));
  }
}
BENCHMARK(BM_Bernoulli)->Args({7, 7})->Args({20, 40})->Args({31, 62});

static void BM_TriangleBuild(benchmark::State& state) {
  int size = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Triangle triangle(size, size);
    benchmark::DoNotOptimize(triangle.value(size, size));
  }
}
BENCHMARK(BM_TriangleBuild)->Arg(7)->Arg(30);

static void BM_CorrectTests(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(correct_tests(7, 7, 128));
  }
}
BENCHMARK(BM_CorrectTests);

static void BM_ClassifyMove(benchmark::State& state) {
  GameState s = refutation_state(7, 7, 128, PlayerId::First);
  MoveRecord rec{s, PlayerId::First, Role::P, Action::test(64)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_move(rec));
  }
}
BENCHMARK(BM_ClassifyMove);

static void BM_MinimaxFresh(benchmark::State& state) {
  GameState root = refutation_state(2, static_cast<int>(state.range(0)),
                                    static_cast<int>(state.range(1)),
                                    PlayerId::First);
  for (auto _ : state) {
    benchmark::DoNotOptimize(minimax_value(root));
  }
}
BENCHMARK(BM_MinimaxFresh)->Args({4, 11})->Args({6, 22});

static void BM_EnumerateStates(benchmark::State& state) {
  for (auto _ : state) {
    EnumerationResult result = enumerate_states(2, 6, 22);
    benchmark::DoNotOptimize(result.count);
  }
}
BENCHMARK(BM_EnumerateStates);

BENCHMARK_MAIN();
