#include <benchmark/benchmark.h>

#include "forge/extractor.hpp"
#include "forge/ingest.hpp"

namespace {

std::vector<forge::RawSourceFile> fixture_files() {
  forge::ScanOptions o;
  o.include_langs = {forge::kAllLanguages.begin(), forge::kAllLanguages.end()};
  return forge::scan_corpus({std::filesystem::path(FORGE_FIXTURES) / "corpus"}, o);
}

void BM_ParseAndExtract(benchmark::State& state) {
  const auto files = fixture_files();
  std::size_t bytes = 0;
  for (const auto& f : files) bytes += f.content.size();
  for (auto _ : state) {
    for (const auto& f : files) {
      auto parsed = forge::parse_file(f);
      benchmark::DoNotOptimize(forge::extract_units(parsed.tree, f));
      benchmark::DoNotOptimize(forge::extract_inline_blocks(parsed.tree, f));
    }
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes));
}
BENCHMARK(BM_ParseAndExtract);

}  // namespace
