#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forge/ingest.hpp"
#include "forge/syntax_tree.hpp"

namespace forge {

enum class UnitKind { kFunction, kClass };
std::string_view unit_kind_name(UnitKind kind);

struct ExtractedUnit {
  std::string repo_id;
  std::string rel_path;
  LanguageId language = LanguageId::kPython;
  UnitKind kind = UnitKind::kFunction;
  std::string identifier;
  bool anonymous = false;
  std::string code;
  std::uint32_t start_byte = 0;  // code_span
  std::uint32_t end_byte = 0;
  std::uint32_t start_line = 0;
  std::uint32_t end_line = 0;
  std::optional<std::string> docstring_raw;
  std::vector<std::string> code_tokens;
  std::optional<std::vector<std::string>> docstring_tokens;
  bool token_fallback = false;

  // "<repo>/<path>#<start>-<end>", unique within a corpus.
  std::string key() const;
};

struct InlineSample {
  std::string repo_id;
  std::string rel_path;
  LanguageId language = LanguageId::kPython;
  std::string comment;  // comment text without comment markers
  std::vector<std::string> comment_tokens;
  std::string prev_context;
  std::string next_context;
  std::optional<std::string> enclosing_identifier;
  std::uint32_t start_byte = 0;  // span of the merged comment lines
  std::uint32_t end_byte = 0;

  std::string key() const;
};

struct DroppedUnit {
  std::string key;
  std::string reason;  // "class-token-limit"
};

struct ExtractOptions {
  std::size_t max_class_tokens = 5000;
};

// Parses a file with its language's grammar. The returned tree views
// `file.content`, which must outlive it.
ParseOutcome parse_file(const RawSourceFile& file);

// Breadth-first over the tree: every function and class definition outside
// error regions, at any depth, with its associated docstring.
std::vector<ExtractedUnit> extract_units(const SyntaxTree& tree,
                                         const RawSourceFile& file,
                                         const ExtractOptions& options = {},
                                         std::vector<DroppedUnit>* dropped = nullptr);

// Line comments inside function bodies with their surrounding statement runs.
// Token bounds are applied later, when comments are cleaned.
std::vector<InlineSample> extract_inline_blocks(const SyntaxTree& tree,
                                                const RawSourceFile& file);

}  // namespace forge
