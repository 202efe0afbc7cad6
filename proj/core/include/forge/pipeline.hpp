#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/consistency.hpp"
#include "forge/extractor.hpp"
#include "forge/filters.hpp"
#include "forge/language.hpp"
#include "forge/minhash.hpp"
#include "forge/split.hpp"

namespace forge {

struct PipelineConfig {
  std::vector<std::filesystem::path> roots;
  std::vector<std::filesystem::path> manifests;  // corpus.jsonl inputs
  LanguageSet languages{kAllLanguages.begin(), kAllLanguages.end()};
  std::uintmax_t max_file_bytes = 1u << 20;
  ExtractOptions extract;
  FilterConfig filters;
  bool gate_enabled = true;
  GateConfig gate;
  bool export_training = false;  // writes gate_training/{train,valid,test}.jsonl
  std::vector<std::filesystem::path> holdouts;  // {key, code_tokens} JSONL
  MinHashParams minhash;
  SplitParams split;
  std::array<double, 2> subset_fractions{0.05, 0.2};
  std::filesystem::path out;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  bool resume = true;

  // Relative paths are resolved against `base`. Throws ConfigError.
  static PipelineConfig from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base = {});
  static PipelineConfig load(const std::filesystem::path& path);
  // The seed is copied into every seeded component here.
  void validate();
  // Everything that affects outputs; `out`, `jobs` and `resume` are left out.
  nlohmann::json to_json() const;
};

// One record stream through a stage: in == out + sum(dropped).
struct StreamCount {
  std::size_t in = 0;
  std::size_t out = 0;
  std::map<std::string, std::size_t> dropped;

  bool balanced() const;
  nlohmann::json to_json() const;
  static StreamCount from_json(const nlohmann::json& j);
};

struct StageReport {
  std::string name;
  std::map<std::string, StreamCount> streams;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const;
  static StageReport from_json(const nlohmann::json& j);
};

// Stage functions read and write files so each one can run alone from the
// CLI or be skipped on resume. They throw StageError on failure.

// Writes raw.jsonl records {repo, path, language, content, content_hash}.
StageReport run_ingest(const PipelineConfig& cfg, const std::filesystem::path& raw_out);

StageReport run_extract(const std::filesystem::path& raw_in, const ExtractOptions& options,
                        std::size_t jobs, const std::filesystem::path& units_out,
                        const std::filesystem::path& blocks_out);

// {key, docstring_params} for every unit with a docstring.
StageReport run_docstring_parse(const std::filesystem::path& units_in, std::size_t jobs,
                                const std::filesystem::path& metadata_out);

struct FilterOutputs {
  std::filesystem::path pairs;     // cleaned paired records
  std::filesystem::path unimodal;  // D_unimodal
  std::filesystem::path blocks;    // D_block
  std::filesystem::path traces;    // per-sample FilterTrace
  std::filesystem::path report_csv;
  std::filesystem::path report_json;
};
StageReport run_rule_filter(const std::filesystem::path& units_in,
                            const std::filesystem::path& metadata_in,
                            const std::filesystem::path& blocks_in, const FilterConfig& cfg,
                            std::size_t jobs, const FilterOutputs& out);

// Scores paired records; kept records go to pairs_out, every score to
// scores_out.
StageReport run_gate(const std::filesystem::path& pairs_in, const GateConfig& cfg,
                     std::size_t jobs, const std::filesystem::path& pairs_out,
                     const std::filesystem::path& scores_out);

// Matches against the holdout files; matched keys are excluded.
StageReport run_dedup(const std::filesystem::path& pairs_in,
                      const std::vector<std::filesystem::path>& holdouts,
                      const MinHashParams& params, std::size_t jobs,
                      const std::filesystem::path& report_out,
                      const std::filesystem::path& excluded_out);

// Splits the non-excluded pairs and writes the manifest plus the final
// paired dataset.
StageReport run_split(const std::filesystem::path& pairs_in,
                      const std::filesystem::path& excluded_in, const SplitParams& params,
                      std::array<double, 2> subset_fractions,
                      const std::filesystem::path& manifest_out,
                      const std::filesystem::path& pairs_out);

struct PipelineResult {
  std::vector<StageReport> stages;
  std::vector<std::string> resumed;  // stages skipped thanks to a valid marker
  nlohmann::json manifest;
};

// ingest -> extract -> docstring-parse -> rule-filter -> gate -> dedup ->
// split, then stats and run_manifest.json. Intermediates and stage markers
// live in <out>/work.
PipelineResult run_pipeline(const PipelineConfig& cfg);

// Holdout export: maps benchmark fields onto {key, code_tokens}. `field_map`
// keys are "key", "code" and optionally "language". code_tokens are those of
// the outermost definitions, extracted as corpus units are. Returns the
// record count.
std::size_t export_holdout(const std::filesystem::path& benchmark,
                           const std::map<std::string, std::string>& field_map,
                           std::optional<LanguageId> default_language,
                           const std::filesystem::path& out);

// Reads a holdout file into signatures.
std::vector<HashedSample> load_holdout(const std::filesystem::path& path,
                                       const MinHashParams& params);

// fnv1a64 over the file bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

}  // namespace forge
