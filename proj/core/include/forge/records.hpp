#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "forge/docstring.hpp"
#include "forge/extractor.hpp"

namespace forge {

inline constexpr int kSchemaVersion = 1;

nlohmann::json metadata_to_json(const DocstringMetadata& md);

// Full-fidelity unit record used by `forge extract` and stage intermediates.
nlohmann::json unit_to_json(const ExtractedUnit& u);
ExtractedUnit unit_from_json(const nlohmann::json& j);  // throws on bad input

nlohmann::json inline_to_json(const InlineSample& s);
InlineSample inline_from_json(const nlohmann::json& j);

// D_paired: cleaned docstring, its tokens and the parsed metadata.
nlohmann::json paired_record(const ExtractedUnit& u, const std::string& docstring,
                             const DocstringMetadata& md);
// D_unimodal: docstring fields are null.
nlohmann::json unimodal_record(const ExtractedUnit& u);
// D_block.
nlohmann::json block_record(const InlineSample& s);

// code_tokens joined by spaces: the code a scorer sees, without comments or
// the docstring literal.
std::string code_token_text(const nlohmann::json& record);

// Deterministic single-line serialization (sorted keys, invalid UTF-8
// replaced).
std::string dump_line(const nlohmann::json& j);

// Writes to "<path>.tmp" and renames on commit, so a crashed stage never
// leaves a half-written file under the final name.
class JsonlWriter {
 public:
  explicit JsonlWriter(std::filesystem::path path);
  ~JsonlWriter();
  void write(const nlohmann::json& j);
  void write_raw(const std::string& line);  // line without trailing newline
  void commit();
  std::size_t count() const { return count_; }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  std::size_t count_ = 0;
  bool committed_ = false;
};

struct JsonlReadStats {
  std::size_t lines = 0;      // non-blank lines
  std::size_t malformed = 0;  // unparsable or rejected by the callback
};

// Calls fn for every parsed object line. A line that fails to parse, is not
// an object, or makes fn throw std::exception counts as malformed.
JsonlReadStats read_jsonl(const std::filesystem::path& path,
                          const std::function<void(const nlohmann::json&)>& fn);

// Writes a whole file atomically.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace forge
