#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

namespace forge {

// Bin i covers [kHistogramEdges[i], kHistogramEdges[i+1]); the last bin is
// open-ended.
inline constexpr std::array<std::size_t, 9> kHistogramEdges = {0,   8,   16,  32,  64,
                                                               128, 256, 512, 1024};
using Histogram = std::array<std::size_t, kHistogramEdges.size()>;

std::size_t histogram_bin(std::size_t length);

struct LanguageStats {
  std::size_t n_with_docstring = 0;
  std::size_t n_total = 0;
  std::size_t n_blocks = 0;  // D_block records
  std::size_t n_repos = 0;
  std::size_t unique_code_tokens = 0;
  std::size_t unique_docstring_tokens = 0;
  std::size_t unique_identifiers = 0;  // synthesized anonymous names excluded
  Histogram code_length{};
  Histogram docstring_length{};
  std::map<std::string, std::size_t> styles;

  nlohmann::json to_json() const;
  bool operator==(const LanguageStats&) const = default;
};

struct DatasetStats {
  std::map<std::string, LanguageStats> languages;
  LanguageStats all;
  std::size_t lines = 0;
  std::size_t malformed = 0;

  double malformed_fraction() const {
    return lines == 0 ? 0.0 : static_cast<double>(malformed) / static_cast<double>(lines);
  }
  nlohmann::json to_json() const;
  // One row per language plus "all"; histogram bins as columns.
  std::string to_csv() const;
  bool operator==(const DatasetStats&) const = default;
};

// Accepts D_paired, D_unimodal and D_block records.
class StatsAccumulator {
 public:
  // Throws std::invalid_argument for a record missing required fields.
  void add(const nlohmann::json& record);
  DatasetStats finish() const;

 private:
  struct Sets {
    LanguageStats counts;
    std::unordered_set<std::string> repos, code_tokens, doc_tokens, identifiers;
  };
  static void add_to(Sets& s, const nlohmann::json& r);
  static LanguageStats finalize(const Sets& s);

  std::map<std::string, Sets> per_lang_;
  Sets all_;
};

// Reads every file, skipping malformed lines. Throws DataQualityError when
// more than `max_malformed` of the lines are malformed, unless it is negative.
DatasetStats compute_stats(const std::vector<std::filesystem::path>& files,
                           double max_malformed = 0.01);

}  // namespace forge
