#include <benchmark/benchmark.h>

#include <sstream>

#include "dnnd/dataio.hpp"
#include "dnnd/evaluation.hpp"
#include "dnnd/genmodel.hpp"
#include "dnnd/inference.hpp"

using namespace dnnd;

namespace {

HyperParams bench_hp() {
  HyperParams hp;
  hp.alpha = 1.0;
  hp.tau = 1.0;
  hp.gamma = 1.0;
  hp.sigma = 0.3;
  hp.decay1 = DecayFn::window(30.0);
  hp.decay2 = DecayFn::window(30.0);
  return hp;
}

std::vector<Edge> simulated(std::size_t n) {
  Rng rng(n);
  return gen::simulate_dnnd(bench_hp(), gen::unit_schedule(n), rng).edges;
}

}  // namespace

static void BM_Sweep(benchmark::State& st) {
  const auto edges = simulated(static_cast<std::size_t>(st.range(0)));
  infer::ChainConfig cfg;
  cfg.init = bench_hp();
  infer::Sampler s(edges, cfg);
  for (int k = 0; k < 10; ++k) s.sweep();
  for (auto _ : st) s.sweep();
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Sweep)->Arg(1000)->Arg(2000)->Arg(4000)->Arg(8000)->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oN);

static void BM_SimulateDnnd(benchmark::State& st) {
  const auto times = gen::unit_schedule(static_cast<std::size_t>(st.range(0)));
  Rng rng(1);
  for (auto _ : st) benchmark::DoNotOptimize(gen::simulate_dnnd(bench_hp(), times, rng));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_SimulateDnnd)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_LeftToRight(benchmark::State& st) {
  const auto all = simulated(300);
  auto [train, test] = io::split_train_test(all, 0.9);
  auto idx = io::reindex(train, test);
  infer::ChainConfig cfg;
  cfg.init = bench_hp();
  cfg.iterations = 20;
  cfg.burnin = 19;
  auto samples = infer::run_chain(idx.train, cfg);
  Rng rng(2);
  for (auto _ : st) {
    benchmark::DoNotOptimize(eval::left_to_right_sample(
        idx.train, samples.front(), idx.test, static_cast<std::size_t>(st.range(0)), false,
        rng));
  }
}
BENCHMARK(BM_LeftToRight)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_ParseEdgeList(benchmark::State& st) {
  std::ostringstream text;
  io::write_edge_list(io::from_edges(simulated(50000)), text);
  const std::string data = text.str();
  for (auto _ : st) {
    std::istringstream in(data);
    benchmark::DoNotOptimize(io::parse_edge_list(in, "bench"));
  }
  st.SetBytesProcessed(st.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_ParseEdgeList)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
