#include "forge/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "forge/error.hpp"
#include "forge/hash.hpp"
#include "forge/utf8.hpp"

namespace fs = std::filesystem;

namespace forge {
namespace {

struct Candidate {
  std::string repo_id;
  std::string rel_path;
  LanguageId language;
  fs::path disk_path;                 // empty for manifest records
  std::optional<std::string> inline_content;
};

bool hidden(const fs::path& p) {
  const auto name = p.filename().string();
  return name.size() > 1 && name[0] == '.';
}

void collect_root(const fs::path& root, const ScanOptions& options,
                  std::vector<Candidate>& out) {
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    throw StageError("ingest", "corpus root is not a readable directory: " +
                                   root.string());
  fs::recursive_directory_iterator it(
      root, fs::directory_options::skip_permission_denied, ec);
  if (ec)
    throw StageError("ingest", "cannot read corpus root " + root.string() +
                                   ": " + ec.message());
  const auto root_name = root.filename().empty()
                             ? root.parent_path().filename().string()
                             : root.filename().string();
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    const auto& entry = *it;
    if (hidden(entry.path())) {
      if (entry.is_directory(ec)) it.disable_recursion_pending();
      continue;
    }
    if (!entry.is_regular_file(ec)) continue;
    const auto rel = entry.path().lexically_relative(root);
    auto first = rel.begin();
    if (first == rel.end()) continue;
    std::string repo_id;
    fs::path inner;
    if (std::next(first) == rel.end()) {
      repo_id = root_name;
      inner = rel;
    } else {
      repo_id = first->string();
      for (auto p = std::next(first); p != rel.end(); ++p) inner /= *p;
    }
    const auto rel_path = inner.generic_string();
    auto lang = detect_language(rel_path);
    if (!lang || !options.include_langs.count(*lang)) continue;
    out.push_back({repo_id, rel_path, *lang, entry.path(), std::nullopt});
  }
}

void collect_manifest(const fs::path& manifest, const ScanOptions& options,
                      std::vector<Candidate>& out) {
  std::ifstream in(manifest);
  if (!in)
    throw StageError("ingest", "cannot open manifest " + manifest.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw StageError("ingest", manifest.string() + ":" +
                                     std::to_string(line_no) + ": " + e.what());
    }
    if (!j.contains("repo") || !j.contains("path") || !j.contains("content"))
      throw StageError("ingest", manifest.string() + ":" +
                                     std::to_string(line_no) +
                                     ": record needs repo, path and content");
    const auto path = j["path"].get<std::string>();
    auto lang = detect_language(path);
    if (!lang || !options.include_langs.count(*lang)) continue;
    out.push_back({j["repo"].get<std::string>(), path, *lang, {},
                   j["content"].get<std::string>()});
  }
}

}  // namespace

ScanStats scan_corpus(const std::vector<fs::path>& roots,
                      const ScanOptions& options, const FileSink& sink) {
  std::vector<Candidate> candidates;
  for (const auto& root : roots) collect_root(root, options, candidates);
  for (const auto& manifest : options.manifests)
    collect_manifest(manifest, options, candidates);

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return std::tie(a.repo_id, a.rel_path) <
                            std::tie(b.repo_id, b.rel_path);
                   });

  ScanStats stats;
  stats.matched = candidates.size();
  for (auto& c : candidates) {
    const auto where = c.repo_id + "/" + c.rel_path;
    std::string bytes;
    if (c.inline_content) {
      bytes = std::move(*c.inline_content);
    } else {
      std::error_code ec;
      const auto size = fs::file_size(c.disk_path, ec);
      if (ec) {
        ++stats.skipped_unreadable;
        stats.skip_log.push_back(where + ": unreadable");
        continue;
      }
      if (size > options.max_file_bytes) {
        ++stats.skipped_too_large;
        stats.skip_log.push_back(where + ": larger than max_file_bytes");
        continue;
      }
      std::ifstream in(c.disk_path, std::ios::binary);
      if (!in) {
        ++stats.skipped_unreadable;
        stats.skip_log.push_back(where + ": unreadable");
        continue;
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      bytes = std::move(buf).str();
    }
    if (bytes.size() > options.max_file_bytes) {
      ++stats.skipped_too_large;
      stats.skip_log.push_back(where + ": larger than max_file_bytes");
      continue;
    }
    auto decoded = decode_utf8_lossy(bytes);
    if (decoded.binary) {
      ++stats.skipped_undecodable;
      stats.skip_log.push_back(where + ": undecodable");
      continue;
    }
    RawSourceFile file;
    file.repo_id = std::move(c.repo_id);
    file.rel_path = std::move(c.rel_path);
    file.language = c.language;
    file.content = std::move(decoded.text);
    file.content_hash = fnv1a64(file.content);
    ++stats.emitted;
    sink(std::move(file));
  }
  return stats;
}

std::vector<RawSourceFile> scan_corpus(const std::vector<fs::path>& roots,
                                       const ScanOptions& options,
                                       ScanStats* stats) {
  std::vector<RawSourceFile> files;
  auto s = scan_corpus(roots, options,
                       [&](RawSourceFile&& f) { files.push_back(std::move(f)); });
  if (stats) *stats = std::move(s);
  return files;
}

void write_raw_record(std::ostream& out, const RawSourceFile& file) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(file.content_hash));
  nlohmann::ordered_json j;
  j["repo"] = file.repo_id;
  j["path"] = file.rel_path;
  j["language"] = language_name(file.language);
  j["content_hash"] = hex;
  out << j.dump() << '\n';
}

}  // namespace forge
