#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/language.hpp"

namespace forge {

enum class PairOrigin { kNatural, kShuffled };
enum class ScoreBackend { kBaseline, kSidecar };

std::string_view backend_name(ScoreBackend backend);
std::optional<ScoreBackend> parse_backend(std::string_view name);

struct PairInput {
  std::string key;
  std::string code;
  std::string docstring;
  LanguageId language = LanguageId::kPython;
};

struct LabeledPair {
  std::string key;  // natural: sample key; shuffled: "<code key>|<doc key>"
  std::string code;
  std::string docstring;
  LanguageId language = LanguageId::kPython;
  int label = 1;    // 1 consistent, 0 inconsistent
  PairOrigin origin = PairOrigin::kNatural;
  std::string code_source;
  std::string docstring_source;

  nlohmann::json to_json() const;
};

// All naturals (label 1) in input order, then ceil(ratio * n) shuffled pairs
// per language (label 0) drawn from seeded derangements, so a code is never
// paired with its own docstring. Buckets of one are skipped with a warning.
std::vector<LabeledPair> generate_negatives(const std::vector<PairInput>& pairs,
                                            std::uint64_t seed, double ratio,
                                            std::vector<std::string>* warnings = nullptr);

// Identifier-aware word set: camelCase and snake_case split, lower-cased,
// common English stop words removed, plural and -ing/-ed endings folded.
std::vector<std::string> lexical_terms(std::string_view text);

// |D∩C| / (|D∩C| + |D\C| + 0.05 |C\D|) over the term sets of docstring (D)
// and code (C); 0 when either set is empty.
double baseline_score(std::string_view code, std::string_view docstring);

struct ScoreRequest {
  std::string code;
  std::string docstring;
  LanguageId language = LanguageId::kPython;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual ScoreBackend backend() const = 0;
  // One score per request, in request order.
  virtual std::vector<double> score_batch(const std::vector<ScoreRequest>& batch) = 0;
};

class BaselineScorer : public Scorer {
 public:
  ScoreBackend backend() const override { return ScoreBackend::kBaseline; }
  std::vector<double> score_batch(const std::vector<ScoreRequest>& batch) override;
};

struct ScoreRecord {
  std::string key;
  double score = 0.0;
  ScoreBackend backend = ScoreBackend::kBaseline;
  bool keep = true;
  bool fail_open = false;  // sidecar unavailable, kept without a score

  nlohmann::json to_json() const;
};

struct GateResult {
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
};

// keep <=> score >= threshold. Throws StageError naming the keys that have
// no score.
GateResult gate(const std::vector<std::string>& keys,
                const std::map<std::string, double>& scores, double threshold);

// Mann-Whitney AUC; ties count one half. Throws std::invalid_argument when
// sizes differ or a class is missing.
double evaluate_auc(const std::vector<double>& scores, const std::vector<int>& labels);

enum class ConfidenceGroup { kConsistent, kInconsistent, kUncertain };
std::string_view confidence_group_name(ConfidenceGroup g);

struct AuditSample {
  std::string key;
  LanguageId language = LanguageId::kPython;
  double score = 0.0;
  ConfidenceGroup group = ConfidenceGroup::kUncertain;
};

struct ScoredSample {
  std::string key;
  LanguageId language = LanguageId::kPython;
  double score = 0.0;
};

// Per language: the `per_group` highest scores, the `per_group` lowest, and
// the `per_group` closest to 0.5 among the rest. Ties break by key.
std::vector<AuditSample> stratify_by_confidence(const std::vector<ScoredSample>& samples,
                                                std::size_t per_group = 100);

struct GateConfig {
  double threshold = 0.5;
  ScoreBackend backend = ScoreBackend::kBaseline;
  double sample_fraction = 0.12;
  double negative_ratio = 1.0;
  std::array<unsigned, 3> split_ratio{3, 1, 1};
  bool fail_open = false;
  std::string sidecar_command;
  std::size_t batch_size = 64;
  int timeout_ms = 30000;

  static GateConfig from_json(const nlohmann::json& j);  // throws ConfigError
  nlohmann::json to_json() const;
  void validate() const;
};

struct TrainingExport {
  std::vector<LabeledPair> train;
  std::vector<LabeledPair> valid;
  std::vector<LabeledPair> test;
};

// Carves sample_fraction of the naturals by seeded hash, adds negatives and
// splits train/valid/test by seeded hash of the pair key.
TrainingExport build_training_export(const std::vector<PairInput>& pairs,
                                     const GateConfig& config, std::uint64_t seed,
                                     std::vector<std::string>* warnings = nullptr);

// Writes train.jsonl, valid.jsonl and test.jsonl under `dir`.
void write_training_export(const TrainingExport& data, const std::filesystem::path& dir);

}  // namespace forge
