#include <benchmark/benchmark.h>

#include <random>

#include "forge/minhash.hpp"

namespace {

std::vector<std::string> tokens(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back("t" + std::to_string(rng() % 5000));
  return v;
}

void BM_Signature(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto t = tokens(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(forge::minhash_signature(t, 256, 5, 1));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Signature)->Arg(64)->Arg(256)->Arg(1024);

void BM_NearDuplicates(benchmark::State& state) {
  std::mt19937_64 rng(3);
  forge::MinHashParams p;
  std::vector<forge::HashedSample> corpus, holdout;
  for (int i = 0; i < state.range(0); ++i)
    corpus.push_back(forge::hash_sample("c" + std::to_string(i), tokens(rng, 120), p));
  for (int i = 0; i < 500; ++i)
    holdout.push_back(forge::hash_sample("h" + std::to_string(i), tokens(rng, 120), p));
  for (auto _ : state) benchmark::DoNotOptimize(forge::find_near_duplicates(corpus, holdout, p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NearDuplicates)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
