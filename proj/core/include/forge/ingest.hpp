#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "forge/language.hpp"

namespace forge {

struct RawSourceFile {
  std::string repo_id;
  std::string rel_path;  // relative to the repo directory, '/'-separated
  LanguageId language = LanguageId::kPython;
  std::string content;   // valid UTF-8
  std::uint64_t content_hash = 0;
};

struct ScanOptions {
  LanguageSet include_langs;
  std::uintmax_t max_file_bytes = 1u << 20;
  // Optional JSONL manifest of {"repo", "path", "content"} records, read in
  // addition to the directory roots.
  std::vector<std::filesystem::path> manifests;
};

struct ScanStats {
  std::size_t matched = 0;  // files whose extension maps to an included language
  std::size_t emitted = 0;
  std::size_t skipped_unreadable = 0;
  std::size_t skipped_too_large = 0;
  std::size_t skipped_undecodable = 0;
  std::vector<std::string> skip_log;  // "<repo>/<path>: <reason>"

  std::size_t skipped() const {
    return skipped_unreadable + skipped_too_large + skipped_undecodable;
  }
};

using FileSink = std::function<void(RawSourceFile&&)>;

// Walks every root and emits files in lexicographic (repo_id, rel_path)
// order. repo_id is the first path component below the root. Throws
// StageError if a root is missing or unreadable.
ScanStats scan_corpus(const std::vector<std::filesystem::path>& roots,
                      const ScanOptions& options, const FileSink& sink);

// Convenience wrapper collecting the stream into a vector.
std::vector<RawSourceFile> scan_corpus(
    const std::vector<std::filesystem::path>& roots, const ScanOptions& options,
    ScanStats* stats = nullptr);

// One `--dump-raw` line: {"repo","path","language","content_hash"}.
void write_raw_record(std::ostream& out, const RawSourceFile& file);

}  // namespace forge
