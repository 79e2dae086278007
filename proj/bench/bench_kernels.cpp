// Serial reference vs OpenMP kernels on the same inputs.

#include <benchmark/benchmark.h>

#include "plankforge/constructions.hpp"
#include "plankforge/kernels.hpp"
#include "plankforge/plank.hpp"

using namespace plankforge;

namespace {

const WeightMatrix& triangular(std::size_t n) {
  static const WeightMatrix w = main_theorem_weights(NormFamily::power(1, 0.5), n);
  return w;
}

VectorBlock sign_block(std::size_t n) {
  const auto space = SpaceModel::euclidean_real(16);
  std::vector<Vector> xs;
  for (std::size_t i = 0; i < n; ++i) xs.push_back(random_unit(space, 1, i));
  return VectorBlock::from(xs);
}

std::vector<Plank> some_planks() {
  const auto space = SpaceModel::euclidean_real(32);
  std::vector<Vector> xs;
  for (std::size_t i = 0; i < 64; ++i) xs.push_back(8.0 * random_unit(space, 2, i));
  return planks_from_sequence(xs);
}

template <bool Parallel>
void row_transforms(benchmark::State& state) {
  const auto& w = triangular(4000);
  const auto a = ScalarSequence::from_function(4000, [](std::size_t m) { return 1.0 / double(m); });
  for (auto _ : state) {
    auto v = Parallel ? kernels::row_transforms(w, a) : reference::row_transforms(w, a);
    benchmark::DoNotOptimize(v.data());
  }
}

template <bool Parallel>
void sign_search(benchmark::State& state) {
  const auto block = sign_block(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto s = Parallel ? kernels::best_sign_pattern(block) : reference::best_sign_pattern(block);
    benchmark::DoNotOptimize(s.best_norm);
  }
}

template <bool Parallel>
void coverage(benchmark::State& state) {
  const auto planks = some_planks();
  const auto space = planks.front().direction.space;
  for (auto _ : state) {
    auto f = Parallel ? kernels::coverage_flags(planks, space, 1.0, 20000, 3)
                      : reference::coverage_flags(planks, space, 1.0, 20000, 3);
    benchmark::DoNotOptimize(f.data());
  }
}

template <bool Parallel>
void witness(benchmark::State& state) {
  const auto xs = main_theorem_sequence(SpaceModel::euclidean_real(40), NormFamily::power(1, 1), 40,
                                        std::uint64_t{5});
  WitnessOptions opt;
  opt.restarts = 16;
  opt.budget = 2000;
  for (auto _ : state) {
    auto runs = Parallel ? kernels::witness_restarts(xs, 1.4, opt, false)
                         : reference::witness_restarts(xs, 1.4, opt, false);
    benchmark::DoNotOptimize(runs.data());
  }
}

}  // namespace

BENCHMARK(row_transforms<false>)->Name("row_transforms/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(row_transforms<true>)->Name("row_transforms/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(sign_search<false>)->Name("sign_search/serial")->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(sign_search<true>)->Name("sign_search/parallel")->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(coverage<false>)->Name("coverage/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(coverage<true>)->Name("coverage/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(witness<false>)->Name("witness/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(witness<true>)->Name("witness/parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
