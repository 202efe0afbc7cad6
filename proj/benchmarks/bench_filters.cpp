#include <benchmark/benchmark.h>

#include <random>

#include "docgen.hpp"
#include "forge/filters.hpp"
#include "forge/tokenize.hpp"

namespace {

std::vector<std::string> corpus(std::size_t n) {
  std::mt19937_64 rng(1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(testutil::random_docstring(rng));
  return out;
}

void BM_UpdateChain(benchmark::State& state) {
  const auto docs = corpus(1000);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forge::apply_update_filters(docs[i++ % docs.size()]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_UpdateChain);

void BM_RemoveChain(benchmark::State& state) {
  std::vector<std::pair<std::vector<std::string>, std::string>> docs;
  for (const auto& d : corpus(1000)) {
    auto t = forge::apply_update_filters(d).text;
    docs.emplace_back(forge::tokenize_text(t), t);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [toks, text] = docs[i++ % docs.size()];
    benchmark::DoNotOptimize(forge::apply_remove_filters(toks, text));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RemoveChain);

}  // namespace
