#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "concept_align/kernels.hpp"

using namespace concept_align;

namespace {

std::vector<float> random_floats(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<double> random_doubles(std::size_t n) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(0) == 0 ? ExecPolicy::Serial : ExecPolicy::Parallel;
}

// One story through a 28-layer, 4096-wide model.
void BM_TokenMean(benchmark::State& state) {
  const std::size_t L = 28, T = 64, D = 4096;
  const auto data = random_floats(L * T * D);
  std::vector<float> out(L * D);
  for (auto _ : state) {
    kernels::token_mean(policy_of(state), data, L, T, D, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * data.size() * sizeof(float)));
}

// One class of 100 pooled statements.
void BM_StackedMean(benchmark::State& state) {
  const std::size_t n = 100, size = 28 * 4096;
  std::vector<std::vector<float>> stack;
  for (std::size_t i = 0; i < n; ++i) stack.push_back(random_floats(size));
  std::vector<std::span<const float>> views(stack.begin(), stack.end());
  std::vector<double> out(size);
  for (auto _ : state) {
    kernels::stacked_mean(policy_of(state), views, out);
    benchmark::DoNotOptimize(out.data());
  }
}

// The full concept set, and a larger one.
void BM_PairwiseCosine(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(1)), D = 4096;
  const auto vecs = random_doubles(n * D);
  std::vector<double> norms(n), out(n * n);
  kernels::row_norms(ExecPolicy::Serial, vecs, n, D, norms);
  for (auto _ : state) {
    kernels::pairwise_cosine(policy_of(state), vecs, norms, n, D, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_TokenMean)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StackedMean)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairwiseCosine)->ArgNames({"parallel", "n"})->ArgsProduct({{0, 1}, {80, 400}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
