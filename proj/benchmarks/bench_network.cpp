#include <benchmark/benchmark.h>

#include <sstream>
#include <vector>

#include "hsr/network.hpp"
#include "hsr/rng.hpp"

using namespace hsr;

namespace {

NetConfig bench_config() {
  NetConfig cfg;
  cfg.head_p_size = 23;
  cfg.init_seed = 5;
  return cfg;
}

std::vector<NetExample> bench_batch(int size) {
  Rng rng(99);
  std::vector<NetExample> batch(static_cast<std::size_t>(size));
  for (NetExample& ex : batch) {
    for (double& x : ex.input) x = rng.uniform();
    ex.p_head = rng.uniform() < 0.5;
    int width = ex.p_head ? 23 : 2;
    ex.pi.assign(static_cast<std::size_t>(width), 0.0);
    ex.pi[rng.below(static_cast<std::uint64_t>(width))] = 1.0;
    ex.z = rng.uniform() < 0.5 ? 1.0 : -1.0;
  }
  return batch;
}

}  // namespace

static void BM_Forward(benchmark::State& state) {
  Network net(bench_config());
  std::array<double, 5> x{1.0, 0.8, 0.96, 0.0, 1.0};
  for (auto _ : state) {
    PolicyValue out = net.evaluate(x);
    benchmark::DoNotOptimize(out.value);
  }
}
BENCHMARK(BM_Forward);

static void BM_TrainBatch(benchmark::State& state) {
  Network net(bench_config());
  std::vector<NetExample> batch = bench_batch(static_cast<int>(state.range(0)));
  TrainHyper hyper;
  for (auto _ : state) {
    TrainStats st = net.train_batch(batch, hyper);
    benchmark::DoNotOptimize(st.loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainBatch)->Arg(32)->Arg(64);

static void BM_CheckpointRoundTrip(benchmark::State& state) {
  Network net(bench_config());
  for (auto _ : state) {
    std::ostringstream out;
    net.save(out);
    std::istringstream in(out.str());
    Network back = Network::load(in);
    benchmark::DoNotOptimize(back.training_steps());
  }
}
BENCHMARK(BM_CheckpointRoundTrip);

BENCHMARK_MAIN();
