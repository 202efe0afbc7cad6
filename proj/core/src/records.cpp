#include "forge/records.hpp"

#include <system_error>

#include "forge/error.hpp"

namespace forge {
namespace {

nlohmann::json opt_string(const std::optional<std::string>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

LanguageId language_field(const nlohmann::json& j) {
  const auto lang = parse_language(j.at("language").get<std::string>());
  if (!lang) throw std::runtime_error("unknown language " + j.at("language").dump());
  return *lang;
}

}  // namespace

nlohmann::json metadata_to_json(const DocstringMetadata& md) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : md.params)
    params.push_back({{"name", p.name},
                      {"type", opt_string(p.type_hint)},
                      {"description", p.description}});
  nlohmann::json raises = nlohmann::json::array();
  for (const auto& r : md.raises)
    raises.push_back({{"exception", r.exception}, {"description", r.description}});
  nlohmann::json returns = nullptr;
  if (md.returns)
    returns = {{"type", opt_string(md.returns->type_hint)},
               {"description", md.returns->description}};
  return {{"style", std::string(style_name(md.style))},
          {"description", md.description},
          {"short_docstring", md.short_docstring},
          {"params", params},
          {"returns", returns},
          {"raises", raises},
          {"other_tags", md.other_tags}};
}

nlohmann::json unit_to_json(const ExtractedUnit& u) {
  nlohmann::json j = {{"schema", kSchemaVersion},
                      {"key", u.key()},
                      {"repo", u.repo_id},
                      {"path", u.rel_path},
                      {"language", std::string(language_name(u.language))},
                      {"kind", std::string(unit_kind_name(u.kind))},
                      {"identifier", u.identifier},
                      {"anonymous", u.anonymous},
                      {"code", u.code},
                      {"code_span", {u.start_byte, u.end_byte}},
                      {"lines", {u.start_line, u.end_line}},
                      {"code_tokens", u.code_tokens},
                      {"token_fallback", u.token_fallback},
                      {"docstring_raw", opt_string(u.docstring_raw)},
                      {"docstring_tokens", u.docstring_tokens
                                               ? nlohmann::json(*u.docstring_tokens)
                                               : nlohmann::json(nullptr)}};
  return j;
}

ExtractedUnit unit_from_json(const nlohmann::json& j) {
  ExtractedUnit u;
  u.repo_id = j.at("repo").get<std::string>();
  u.rel_path = j.at("path").get<std::string>();
  u.language = language_field(j);
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "function") u.kind = UnitKind::kFunction;
  else if (kind == "class") u.kind = UnitKind::kClass;
  else throw std::runtime_error("unknown kind " + kind);
  u.identifier = j.at("identifier").get<std::string>();
  u.anonymous = j.value("anonymous", false);
  u.code = j.at("code").get<std::string>();
  u.start_byte = j.at("code_span").at(0).get<std::uint32_t>();
  u.end_byte = j.at("code_span").at(1).get<std::uint32_t>();
  u.start_line = j.at("lines").at(0).get<std::uint32_t>();
  u.end_line = j.at("lines").at(1).get<std::uint32_t>();
  u.code_tokens = j.at("code_tokens").get<std::vector<std::string>>();
  u.token_fallback = j.value("token_fallback", false);
  if (!j.at("docstring_raw").is_null()) u.docstring_raw = j.at("docstring_raw").get<std::string>();
  if (!j.at("docstring_tokens").is_null())
    u.docstring_tokens = j.at("docstring_tokens").get<std::vector<std::string>>();
  return u;
}

nlohmann::json inline_to_json(const InlineSample& s) {
  return {{"schema", kSchemaVersion},
          {"key", s.key()},
          {"repo", s.repo_id},
          {"path", s.rel_path},
          {"language", std::string(language_name(s.language))},
          {"comment", s.comment},
          {"comment_tokens", s.comment_tokens},
          {"prev_context", s.prev_context},
          {"next_context", s.next_context},
          {"enclosing_identifier", opt_string(s.enclosing_identifier)},
          {"comment_span", {s.start_byte, s.end_byte}}};
}

InlineSample inline_from_json(const nlohmann::json& j) {
  InlineSample s;
  s.repo_id = j.at("repo").get<std::string>();
  s.rel_path = j.at("path").get<std::string>();
  s.language = language_field(j);
  s.comment = j.at("comment").get<std::string>();
  s.comment_tokens = j.at("comment_tokens").get<std::vector<std::string>>();
  s.prev_context = j.at("prev_context").get<std::string>();
  s.next_context = j.at("next_context").get<std::string>();
  if (!j.at("enclosing_identifier").is_null())
    s.enclosing_identifier = j.at("enclosing_identifier").get<std::string>();
  s.start_byte = j.at("comment_span").at(0).get<std::uint32_t>();
  s.end_byte = j.at("comment_span").at(1).get<std::uint32_t>();
  return s;
}

nlohmann::json paired_record(const ExtractedUnit& u, const std::string& docstring,
                             const DocstringMetadata& md) {
  return {{"schema", kSchemaVersion},
          {"key", u.key()},
          {"repo", u.repo_id},
          {"path", u.rel_path},
          {"language", std::string(language_name(u.language))},
          {"kind", std::string(unit_kind_name(u.kind))},
          {"identifier", u.identifier},
          {"code", u.code},
          {"code_tokens", u.code_tokens},
          {"docstring", docstring},
          {"docstring_tokens", u.docstring_tokens ? nlohmann::json(*u.docstring_tokens)
                                                  : nlohmann::json::array()},
          {"docstring_params", metadata_to_json(md)}};
}

nlohmann::json unimodal_record(const ExtractedUnit& u) {
  return {{"schema", kSchemaVersion},
          {"key", u.key()},
          {"repo", u.repo_id},
          {"path", u.rel_path},
          {"language", std::string(language_name(u.language))},
          {"kind", std::string(unit_kind_name(u.kind))},
          {"identifier", u.identifier},
          {"code", u.code},
          {"code_tokens", u.code_tokens},
          {"docstring", nullptr},
          {"docstring_tokens", nullptr}};
}

nlohmann::json block_record(const InlineSample& s) {
  return {{"schema", kSchemaVersion},
          {"key", s.key()},
          {"repo", s.repo_id},
          {"path", s.rel_path},
          {"language", std::string(language_name(s.language))},
          {"comment", s.comment},
          {"comment_tokens", s.comment_tokens},
          {"prev_context", s.prev_context},
          {"next_context", s.next_context}};
}

std::string code_token_text(const nlohmann::json& record) {
  std::string out;
  for (const auto& t : record.at("code_tokens")) {
    if (!out.empty()) out += ' ';
    out += t.get<std::string>();
  }
  return out;
}

std::string dump_line(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

JsonlWriter::JsonlWriter(std::filesystem::path path)
    : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  out_.open(tmp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw StageError("io", "cannot write " + tmp_.string());
}

JsonlWriter::~JsonlWriter() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(tmp_, ec);
  }
}

void JsonlWriter::write(const nlohmann::json& j) { write_raw(dump_line(j)); }

void JsonlWriter::write_raw(const std::string& line) {
  out_ << line << '\n';
  ++count_;
}

void JsonlWriter::commit() {
  out_.close();
  if (!out_) throw StageError("io", "failed writing " + tmp_.string());
  std::filesystem::rename(tmp_, path_);
  committed_ = true;
}

JsonlReadStats read_jsonl(const std::filesystem::path& path,
                          const std::function<void(const nlohmann::json&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StageError("io", "cannot read " + path.string());
  JsonlReadStats st;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++st.lines;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      ++st.malformed;
      continue;
    }
    try {
      fn(j);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      ++st.malformed;
    }
  }
  return st;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StageError("io", "cannot write " + tmp.string());
    out << content;
    if (!out) throw StageError("io", "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace forge
