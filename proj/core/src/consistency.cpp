#include "forge/consistency.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "forge/error.hpp"
#include "forge/hash.hpp"

namespace forge {
namespace {

const std::unordered_set<std::string>& stop_words() {
  static const std::unordered_set<std::string> words = {
      "a",    "an",   "the",  "of",   "to",    "in",   "on",   "for",  "and",
      "or",   "is",   "are",  "be",   "by",    "with", "as",   "at",   "it",
      "its",  "this", "that", "from", "if",    "else", "not",  "no",   "was",
      "were", "will", "can",  "into", "than",  "then", "there", "these",
      "those", "which", "when", "where", "while", "has", "have", "had", "do",
      "does", "we",   "you",  "i",    "our",   "your", "they", "them", "but",
      "so",   "such", "all",  "any",  "each",  "other", "some", "also", "only",
      "may",  "must", "should", "would", "could", "been", "being", "about"};
  return words;
}

bool lower_c(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool upper_c(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool digit_c(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool ends_with(const std::string& t, std::string_view suffix) {
  return t.size() >= suffix.size() && t.compare(t.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Folds common English inflections so "formats" meets "format" and
// "counting" meets "count".
void stem(std::string& t) {
  if (t.size() > 4 && ends_with(t, "ies")) {
    t.replace(t.size() - 3, 3, "y");
  } else if (t.size() > 5 && ends_with(t, "ing")) {
    t.resize(t.size() - 3);
  } else if (t.size() > 4 && ends_with(t, "ed") && !ends_with(t, "eed")) {
    t.resize(t.size() - 2);
  } else if (t.size() > 4 && (ends_with(t, "ches") || ends_with(t, "shes") ||
                              ends_with(t, "sses") || ends_with(t, "xes"))) {
    t.resize(t.size() - 2);
  } else if (t.size() > 3 && ends_with(t, "s") && !ends_with(t, "ss") &&
             !ends_with(t, "us") && !ends_with(t, "is")) {
    t.resize(t.size() - 1);
  }
}

void split_identifier(std::string_view w, std::vector<std::string>& out) {
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    if (end > start) {
      std::string t(w.substr(start, end - start));
      for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (!stop_words().count(t)) {
        stem(t);
        out.push_back(std::move(t));
      }
    }
    start = end;
  };
  for (std::size_t i = 1; i < w.size(); ++i) {
    const char p = w[i - 1];
    const char c = w[i];
    const bool boundary =
        (lower_c(p) && upper_c(c)) ||
        (upper_c(p) && upper_c(c) && i + 1 < w.size() && lower_c(w[i + 1])) ||
        (digit_c(p) != digit_c(c));
    if (boundary) emit(i);
  }
  emit(w.size());
}

std::set<std::string> term_set(std::string_view text) {
  const auto v = lexical_terms(text);
  return {v.begin(), v.end()};
}

}  // namespace

std::string_view backend_name(ScoreBackend backend) {
  return backend == ScoreBackend::kBaseline ? "baseline" : "sidecar";
}

std::optional<ScoreBackend> parse_backend(std::string_view name) {
  if (name == "baseline") return ScoreBackend::kBaseline;
  if (name == "sidecar") return ScoreBackend::kSidecar;
  return std::nullopt;
}

nlohmann::json LabeledPair::to_json() const {
  return {{"schema", 1},
          {"key", key},
          {"language", std::string(language_name(language))},
          {"code", code},
          {"docstring", docstring},
          {"label", label},
          {"origin", origin == PairOrigin::kNatural ? "natural" : "shuffled"}};
}

std::vector<LabeledPair> generate_negatives(const std::vector<PairInput>& pairs,
                                            std::uint64_t seed, double ratio,
                                            std::vector<std::string>* warnings) {
  std::vector<LabeledPair> out;
  out.reserve(pairs.size() * 2);
  std::map<LanguageId, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    out.push_back({p.key, p.code, p.docstring, p.language, 1, PairOrigin::kNatural,
                   p.key, p.key});
    buckets[p.language].push_back(i);
  }
  for (const auto& [lang, idx] : buckets) {
    const std::size_t n = idx.size();
    if (n < 2) {
      if (warnings)
        warnings->push_back("negatives: language " + std::string(language_name(lang)) +
                            " has a single pair; skipped");
      continue;
    }
    const auto want = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
    Rng rng(hash_combine(seed, static_cast<std::uint64_t>(lang) + 1));
    std::size_t made = 0;
    while (made < want) {
      // Sattolo's algorithm: a uniform cyclic permutation, hence a derangement.
      std::vector<std::size_t> perm(n);
      for (std::size_t k = 0; k < n; ++k) perm[k] = k;
      for (std::size_t k = n - 1; k > 0; --k)
        std::swap(perm[k], perm[uniform_below(rng, k)]);
      for (std::size_t k = 0; k < n && made < want; ++k, ++made) {
        const auto& c = pairs[idx[k]];
        const auto& d = pairs[idx[perm[k]]];
        out.push_back({c.key + "|" + d.key, c.code, d.docstring, lang, 0,
                       PairOrigin::kShuffled, c.key, d.key});
      }
    }
  }
  return out;
}

std::vector<std::string> lexical_terms(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isalnum(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) ++j;
    split_identifier(text.substr(i, j - i), out);
    i = j;
  }
  return out;
}

double baseline_score(std::string_view code, std::string_view docstring) {
  const auto c = term_set(code);
  const auto d = term_set(docstring);
  if (c.empty() || d.empty()) return 0.0;
  std::size_t both = 0;
  for (const auto& t : d) both += c.count(t);
  const double only_d = static_cast<double>(d.size() - both);
  const double only_c = static_cast<double>(c.size() - both);
  const double inter = static_cast<double>(both);
  if (both == 0) return 0.0;
  return inter / (inter + only_d + 0.05 * only_c);
}

std::vector<double> BaselineScorer::score_batch(const std::vector<ScoreRequest>& batch) {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& r : batch) out.push_back(baseline_score(r.code, r.docstring));
  return out;
}

nlohmann::json ScoreRecord::to_json() const {
  nlohmann::json j = {{"schema", 1},
                      {"key", key},
                      {"score", score},
                      {"backend", std::string(backend_name(backend))},
                      {"decision", keep ? "keep" : "drop"}};
  if (fail_open) j["fail_open"] = true;
  return j;
}

GateResult gate(const std::vector<std::string>& keys,
                const std::map<std::string, double>& scores, double threshold) {
  GateResult r;
  std::vector<std::string> missing;
  for (const auto& k : keys) {
    const auto it = scores.find(k);
    if (it == scores.end()) {
      missing.push_back(k);
      continue;
    }
    (it->second >= threshold ? r.kept : r.dropped).push_back(k);
  }
  if (!missing.empty()) {
    std::string msg = "missing scores for " + std::to_string(missing.size()) + " sample(s):";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    throw StageError("gate", msg);
  }
  return r;
}

double evaluate_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("evaluate_auc: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos = 0, neg = 0, rank_sum = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // Average 1-based rank of the tie group, kept in halves for exactness.
    const double avg = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        ++pos;
        rank_sum += avg;
      } else if (labels[order[k]] == 0) {
        ++neg;
      } else {
        throw std::invalid_argument("evaluate_auc: labels must be 0 or 1");
      }
    }
    i = j;
  }
  if (pos == 0 || neg == 0)
    throw std::invalid_argument("evaluate_auc: both classes must be present");
  return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

std::string_view confidence_group_name(ConfidenceGroup g) {
  switch (g) {
    case ConfidenceGroup::kConsistent: return "consistent";
    case ConfidenceGroup::kInconsistent: return "inconsistent";
    case ConfidenceGroup::kUncertain: return "uncertain";
  }
  return "uncertain";
}

std::vector<AuditSample> stratify_by_confidence(const std::vector<ScoredSample>& samples,
                                                std::size_t per_group) {
  std::map<LanguageId, std::vector<const ScoredSample*>> by_lang;
  for (const auto& s : samples) by_lang[s.language].push_back(&s);
  std::vector<AuditSample> out;
  for (auto& [lang, v] : by_lang) {
    std::sort(v.begin(), v.end(), [](const ScoredSample* a, const ScoredSample* b) {
      return a->score != b->score ? a->score > b->score : a->key < b->key;
    });
    std::vector<bool> used(v.size(), false);
    for (std::size_t i = 0; i < v.size() && i < per_group; ++i) {
      used[i] = true;
      out.push_back({v[i]->key, lang, v[i]->score, ConfidenceGroup::kConsistent});
    }
    std::size_t taken = 0;
    for (std::size_t i = v.size(); i-- > 0 && taken < per_group;) {
      if (used[i]) break;
      used[i] = true;
      ++taken;
      out.push_back({v[i]->key, lang, v[i]->score, ConfidenceGroup::kInconsistent});
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!used[i]) rest.push_back(i);
    std::sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
      const double da = std::abs(v[a]->score - 0.5);
      const double db = std::abs(v[b]->score - 0.5);
      return da != db ? da < db : v[a]->key < v[b]->key;
    });
    for (std::size_t i = 0; i < rest.size() && i < per_group; ++i)
      out.push_back({v[rest[i]]->key, lang, v[rest[i]]->score, ConfidenceGroup::kUncertain});
  }
  return out;
}

void GateConfig::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ConfigError("gate: threshold must be in (0,1)");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0))
    throw ConfigError("gate: sample_fraction must be in (0,1]");
  if (!(negative_ratio > 0.0))
    throw ConfigError("gate: negative_ratio must be positive");
  if (split_ratio[0] + split_ratio[1] + split_ratio[2] == 0)
    throw ConfigError("gate: split_ratio must not be all zero");
  if (batch_size == 0) throw ConfigError("gate: batch_size must be positive");
  if (timeout_ms <= 0) throw ConfigError("gate: timeout_ms must be positive");
  if (backend == ScoreBackend::kSidecar && sidecar_command.empty())
    throw ConfigError("gate: sidecar backend needs sidecar_command");
}

GateConfig GateConfig::from_json(const nlohmann::json& j) {
  GateConfig c;
  if (!j.is_object()) throw ConfigError("gate config: expected an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      const auto& v = it.value();
      if (k == "threshold") c.threshold = v.get<double>();
      else if (k == "backend") {
        const auto b = parse_backend(v.get<std::string>());
        if (!b) throw ConfigError("gate: unknown backend " + v.get<std::string>());
        c.backend = *b;
      } else if (k == "sample_fraction") c.sample_fraction = v.get<double>();
      else if (k == "negative_ratio") c.negative_ratio = v.get<double>();
      else if (k == "split_ratio") {
        if (!v.is_array() || v.size() != 3) throw ConfigError("gate: split_ratio needs 3 entries");
        for (std::size_t i = 0; i < 3; ++i) c.split_ratio[i] = v[i].get<unsigned>();
      } else if (k == "fail_open") c.fail_open = v.get<bool>();
      else if (k == "sidecar_command") c.sidecar_command = v.get<std::string>();
      else if (k == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (k == "timeout_ms") c.timeout_ms = v.get<int>();
      else throw ConfigError("gate config: unknown key " + k);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("gate config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json GateConfig::to_json() const {
  return {{"threshold", threshold},
          {"backend", std::string(backend_name(backend))},
          {"sample_fraction", sample_fraction},
          {"negative_ratio", negative_ratio},
          {"split_ratio", {split_ratio[0], split_ratio[1], split_ratio[2]}},
          {"fail_open", fail_open},
          {"sidecar_command", sidecar_command},
          {"batch_size", batch_size},
          {"timeout_ms", timeout_ms}};
}

TrainingExport build_training_export(const std::vector<PairInput>& pairs,
                                     const GateConfig& config, std::uint64_t seed,
                                     std::vector<std::string>* warnings) {
  // Fraction test on the top 53 bits of a seeded key hash.
  auto unit = [](std::uint64_t h) {
    return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
  };
  std::vector<PairInput> chosen;
  for (const auto& p : pairs)
    if (unit(seeded_hash(p.key, hash_combine(seed, 0x5a17))) < config.sample_fraction)
      chosen.push_back(p);
  TrainingExport out;
  const auto total = config.split_ratio[0] + config.split_ratio[1] + config.split_ratio[2];
  for (auto& lp : generate_negatives(chosen, seed, config.negative_ratio, warnings)) {
    const auto slot = seeded_hash(lp.key, hash_combine(seed, 0x311)) % total;
    if (slot < config.split_ratio[0]) out.train.push_back(std::move(lp));
    else if (slot < config.split_ratio[0] + config.split_ratio[1]) out.valid.push_back(std::move(lp));
    else out.test.push_back(std::move(lp));
  }
  return out;
}

void write_training_export(const TrainingExport& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::vector<LabeledPair>& v, const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw StageError("score", "cannot write " + (dir / name).string());
    for (const auto& p : v) out << p.to_json().dump() << '\n';
  };
  write(data.train, "train.jsonl");
  write(data.valid, "valid.jsonl");
  write(data.test, "test.jsonl");
}

}  // namespace forge
