// Serial reference kernels vs their OpenMP counterparts.
//   OMP_NUM_THREADS=4 ./enose_bench

#include <benchmark/benchmark.h>

#include <random>

#include "enose/eval.hpp"
#include "enose/kernels.hpp"
#include "enose/nn.hpp"
#include "enose/simulator.hpp"

using namespace enose;

namespace {

Dataset bench_dataset(std::size_t per_class) {
  auto cfg = default_sim_config();
  cfg.samples_per_class = per_class;
  return generate_dataset(cfg);
}

Network bench_network(std::size_t hidden, ActivationMode mode) {
  NetworkConfig nc;
  nc.hidden = hidden;
  nc.activation = mode;
  return init_weights(nc, TrainConfig{});
}

std::vector<ChannelArray> bench_inputs(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ChannelArray> xs(n);
  for (auto& x : xs)
    for (auto& v : x) v = u(rng);
  return xs;
}

template <bool Parallel>
void BM_Forward(benchmark::State& state) {
  const auto mode = state.range(1) ? ActivationMode::Table : ActivationMode::Exact;
  const auto net = bench_network(static_cast<std::size_t>(state.range(2)), mode);
  const auto xs = bench_inputs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto out = Parallel ? forward_batch(net, xs) : forward_batch_serial(net, xs);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Scale(benchmark::State& state) {
  const auto ds = bench_dataset(static_cast<std::size_t>(state.range(0)) / kClasses);
  const auto scaler = fit_scaler(ds);
  for (auto _ : state) {
    auto out = Parallel ? scale_batch(scaler, ds) : scale_batch_serial(scaler, ds);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.size()));
}

template <bool Parallel>
void BM_Tally(benchmark::State& state) {
  const auto ds = bench_dataset(static_cast<std::size_t>(state.range(0)) / kClasses);
  const auto scaler = fit_scaler(ds);
  const auto outputs = forward_batch_serial(bench_network(10, ActivationMode::Exact), scale_batch_serial(scaler, ds));
  std::vector<ChemicalClass> labels;
  for (const auto& s : ds.samples) labels.push_back(s.label);
  for (auto _ : state) {
    auto r = Parallel ? tally(outputs, labels, kDefaultThreshold) : tally_serial(outputs, labels, kDefaultThreshold);
    benchmark::DoNotOptimize(r.fp_activations);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.size()));
}

void forward_args(benchmark::internal::Benchmark* b) {
  for (std::int64_t n : {1 << 12, 1 << 16})
    for (std::int64_t table : {0, 1})
      for (std::int64_t z : {3, 10}) b->Args({n, table, z});
  b->ArgNames({"n", "table", "z"});
}

}  // namespace

BENCHMARK(BM_Forward<false>)->Name("forward/serial")->Apply(forward_args);
BENCHMARK(BM_Forward<true>)->Name("forward/omp")->Apply(forward_args);
BENCHMARK(BM_Scale<false>)->Name("scale/serial")->Arg(1 << 16);
BENCHMARK(BM_Scale<true>)->Name("scale/omp")->Arg(1 << 16);
BENCHMARK(BM_Tally<false>)->Name("tally/serial")->Arg(1 << 16);
BENCHMARK(BM_Tally<true>)->Name("tally/omp")->Arg(1 << 16);

BENCHMARK_MAIN();
