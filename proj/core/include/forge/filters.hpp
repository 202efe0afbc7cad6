#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/extractor.hpp"
#include "forge/language.hpp"

namespace forge {

enum class FilterId {
  kStripDelimiters,
  kStripMathFormulas,
  kStripHtmlTags,
  kStripMetadataTags,
  kStripHyperlink,
  kStripEmbeddedCode,
  kRemoveEmpty,
  kRemoveBadLength,
  kRemoveNonEnglish,
  kRemoveAutoGen,
  kRemoveWip,
  kHandleQuestions,
  kHandleExamplesNotes,
};

inline constexpr std::size_t kFilterCount = 13;

inline constexpr std::array<FilterId, kFilterCount> kAllFilters = {
    FilterId::kStripDelimiters,  FilterId::kStripMathFormulas,
    FilterId::kStripHtmlTags,    FilterId::kStripMetadataTags,
    FilterId::kStripHyperlink,   FilterId::kStripEmbeddedCode,
    FilterId::kRemoveEmpty,      FilterId::kRemoveBadLength,
    FilterId::kRemoveNonEnglish, FilterId::kRemoveAutoGen,
    FilterId::kRemoveWip,        FilterId::kHandleQuestions,
    FilterId::kHandleExamplesNotes,
};

// Order in which update filters run.
inline constexpr std::array<FilterId, 8> kUpdateOrder = {
    FilterId::kStripDelimiters,   FilterId::kStripHyperlink,
    FilterId::kStripEmbeddedCode, FilterId::kStripMathFormulas,
    FilterId::kStripMetadataTags, FilterId::kStripHtmlTags,
    FilterId::kHandleExamplesNotes, FilterId::kHandleQuestions,
};

// Order in which remove filters are checked; the first hit wins.
inline constexpr std::array<FilterId, 5> kRemoveOrder = {
    FilterId::kRemoveEmpty, FilterId::kRemoveBadLength,
    FilterId::kRemoveNonEnglish, FilterId::kRemoveAutoGen,
    FilterId::kRemoveWip,
};

std::string_view filter_name(FilterId id);
std::optional<FilterId> parse_filter_name(std::string_view name);
bool is_update_filter(FilterId id);

struct FilterConfig {
  std::array<bool, kFilterCount> enabled{true, true, true, true, true, true, true,
                                         true, true, true, true, true, true};
  std::size_t min_tokens = 5;
  std::size_t max_tokens = 500;
  std::size_t inline_min_tokens = 3;
  std::size_t inline_max_tokens = 15;
  double english_threshold = 0.5;
  // Case-insensitive substrings.
  std::vector<std::string> autogen_patterns = {
      "@generated",     "begin-user-doc",          "end-user-doc",
      "auto-generated", "automatically generated", "autogenerated",
      "do not edit",    "do not modify"};
  // Case-sensitive, matched at the start of a word.
  std::vector<std::string> wip_patterns = {"TODO", "FIXME", "WIP", "Deprecate",
                                           "TBD"};

  bool is_enabled(FilterId id) const {
    return enabled[static_cast<std::size_t>(id)];
  }

  // Unknown keys and out-of-range values throw ConfigError.
  static FilterConfig from_json(const nlohmann::json& j);
  static FilterConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

// CRLF to LF, trailing whitespace, common indentation and blank edge lines.
// Runs before and after every update filter and never counts as one.
std::string normalize_text(std::string_view text);

// One update filter, run to its fixpoint, on normalized text.
std::string apply_update_filter(FilterId id, std::string_view text,
                                const FilterConfig& config = {});

struct UpdateResult {
  std::string text;
  std::vector<FilterId> applied;  // filters that changed the text, in order
};

UpdateResult apply_update_filters(std::string_view docstring,
                                  const FilterConfig& config = {});

// First matching remove filter, or nullopt to keep.
std::optional<FilterId> apply_remove_filters(
    const std::vector<std::string>& docstring_tokens, std::string_view docstring,
    const FilterConfig& config = {});

// Remove chain with the inline-comment length bounds in place of the
// docstring bounds.
std::optional<FilterId> apply_inline_remove_filters(
    const std::vector<std::string>& comment_tokens, std::string_view comment,
    const FilterConfig& config = {});

struct FilterTrace {
  std::string key;
  LanguageId language = LanguageId::kPython;
  std::vector<FilterId> applied;
  std::optional<FilterId> removed_by;
  std::string text_before;
  std::optional<std::string> text_after;  // none when removed

  nlohmann::json to_json() const;
};

// Update then remove. On keep, the unit's docstring tokens are recomputed
// from the cleaned text, which is also returned in trace.text_after.
FilterTrace clean_pair(ExtractedUnit& unit, const FilterConfig& config = {});

// Same composition for inline comments, with the inline length bounds.
FilterTrace clean_inline(InlineSample& sample, const FilterConfig& config = {});

// Per-language counts of samples touched by each filter. Mergeable.
class FilterReport {
 public:
  void add_inputs(LanguageId language, std::size_t n = 1);
  void add(const FilterTrace& trace);
  void merge(const FilterReport& other);

  std::size_t inputs(std::optional<LanguageId> language = std::nullopt) const;
  std::size_t touched(FilterId id,
                      std::optional<LanguageId> language = std::nullopt) const;
  std::size_t dropped(std::optional<LanguageId> language = std::nullopt) const;
  std::size_t kept(std::optional<LanguageId> language = std::nullopt) const;
  // touched / inputs * 100; 0 when there are no inputs.
  double percentage(FilterId id,
                    std::optional<LanguageId> language = std::nullopt) const;

  std::string to_csv() const;
  nlohmann::json to_json() const;

  bool operator==(const FilterReport&) const = default;

 private:
  struct Row {
    std::size_t inputs = 0;
    std::size_t dropped = 0;
    std::array<std::size_t, kFilterCount> touched{};
    bool operator==(const Row&) const = default;
  };
  std::map<LanguageId, Row> rows_;
};

FilterReport filter_report(const std::vector<FilterTrace>& traces,
                           const std::map<LanguageId, std::size_t>& totals);

}  // namespace forge
