#include "forge/stats.hpp"

#include <sstream>
#include <stdexcept>

#include "forge/error.hpp"
#include "forge/records.hpp"

namespace forge {

std::size_t histogram_bin(std::size_t length) {
  std::size_t bin = 0;
  while (bin + 1 < kHistogramEdges.size() && length >= kHistogramEdges[bin + 1]) ++bin;
  return bin;
}

namespace {

nlohmann::json hist_json(const Histogram& h) {
  nlohmann::json bins = nlohmann::json::array();
  for (std::size_t i = 0; i < h.size(); ++i) {
    nlohmann::json hi = i + 1 < kHistogramEdges.size() ? nlohmann::json(kHistogramEdges[i + 1])
                                                       : nlohmann::json(nullptr);
    bins.push_back({{"lo", kHistogramEdges[i]}, {"hi", hi}, {"count", h[i]}});
  }
  return bins;
}

std::string bin_label(std::size_t i) {
  if (i + 1 < kHistogramEdges.size())
    return std::to_string(kHistogramEdges[i]) + "-" + std::to_string(kHistogramEdges[i + 1]);
  return std::to_string(kHistogramEdges[i]) + "+";
}

const std::vector<std::string>& string_list(const nlohmann::json& r, const char* field,
                                            std::vector<std::string>& storage) {
  const auto& v = r.at(field);
  if (!v.is_array()) throw std::invalid_argument(std::string(field) + " is not a list");
  storage.clear();
  for (const auto& t : v) storage.push_back(t.get<std::string>());
  return storage;
}

}  // namespace

nlohmann::json LanguageStats::to_json() const {
  return {{"n_with_docstring", n_with_docstring},
          {"n_total", n_total},
          {"n_blocks", n_blocks},
          {"n_repos", n_repos},
          {"unique_code_tokens", unique_code_tokens},
          {"unique_docstring_tokens", unique_docstring_tokens},
          {"unique_identifiers", unique_identifiers},
          {"code_length_histogram", hist_json(code_length)},
          {"docstring_length_histogram", hist_json(docstring_length)},
          {"styles", styles}};
}

nlohmann::json DatasetStats::to_json() const {
  nlohmann::json langs = nlohmann::json::object();
  for (const auto& [name, s] : languages) langs[name] = s.to_json();
  return {{"schema", kSchemaVersion},
          {"languages", langs},
          {"all", all.to_json()},
          {"lines", lines},
          {"malformed", malformed}};
}

std::string DatasetStats::to_csv() const {
  std::ostringstream out;
  out << "language,n_with_docstring,n_total,n_blocks,n_repos,unique_code_tokens,"
         "unique_docstring_tokens,unique_identifiers";
  for (std::size_t i = 0; i < kHistogramEdges.size(); ++i) out << ",code_len_" << bin_label(i);
  for (std::size_t i = 0; i < kHistogramEdges.size(); ++i) out << ",doc_len_" << bin_label(i);
  out << '\n';
  auto row = [&](const std::string& name, const LanguageStats& s) {
    out << name << ',' << s.n_with_docstring << ',' << s.n_total << ',' << s.n_blocks << ','
        << s.n_repos << ',' << s.unique_code_tokens << ',' << s.unique_docstring_tokens << ','
        << s.unique_identifiers;
    for (auto c : s.code_length) out << ',' << c;
    for (auto c : s.docstring_length) out << ',' << c;
    out << '\n';
  };
  for (const auto& [name, s] : languages) row(name, s);
  row("all", all);
  return out.str();
}

void StatsAccumulator::add_to(Sets& s, const nlohmann::json& r) {
  std::vector<std::string> buf;
  s.repos.insert(r.at("repo").get<std::string>());
  if (r.contains("comment")) {
    ++s.counts.n_blocks;
    for (const auto& t : string_list(r, "comment_tokens", buf)) s.doc_tokens.insert(t);
    return;
  }
  ++s.counts.n_total;
  const auto& code = string_list(r, "code_tokens", buf);
  for (const auto& t : code) s.code_tokens.insert(t);
  ++s.counts.code_length[histogram_bin(code.size())];
  const auto id = r.at("identifier").get<std::string>();
  if (!id.starts_with("<anonymous")) s.identifiers.insert(id);
  const auto& doc = r.at("docstring");
  if (doc.is_null()) return;
  ++s.counts.n_with_docstring;
  const auto& dt = string_list(r, "docstring_tokens", buf);
  for (const auto& t : dt) s.doc_tokens.insert(t);
  ++s.counts.docstring_length[histogram_bin(dt.size())];
  std::string style = "unstyled";
  if (r.contains("docstring_params") && r["docstring_params"].is_object())
    style = r["docstring_params"].value("style", style);
  ++s.counts.styles[style];
}

void StatsAccumulator::add(const nlohmann::json& record) {
  const auto lang = record.at("language").get<std::string>();
  // Validate into a scratch copy first so a bad record leaves no partial counts.
  Sets probe;
  add_to(probe, record);
  add_to(per_lang_[lang], record);
  add_to(all_, record);
}

LanguageStats StatsAccumulator::finalize(const Sets& s) {
  LanguageStats out = s.counts;
  out.n_repos = s.repos.size();
  out.unique_code_tokens = s.code_tokens.size();
  out.unique_docstring_tokens = s.doc_tokens.size();
  out.unique_identifiers = s.identifiers.size();
  return out;
}

DatasetStats StatsAccumulator::finish() const {
  DatasetStats st;
  for (const auto& [lang, s] : per_lang_) st.languages[lang] = finalize(s);
  st.all = finalize(all_);
  return st;
}

DatasetStats compute_stats(const std::vector<std::filesystem::path>& files,
                           double max_malformed) {
  StatsAccumulator acc;
  std::size_t lines = 0, malformed = 0;
  for (const auto& f : files) {
    const auto rs = read_jsonl(f, [&](const nlohmann::json& j) { acc.add(j); });
    lines += rs.lines;
    malformed += rs.malformed;
  }
  auto st = acc.finish();
  st.lines = lines;
  st.malformed = malformed;
  if (max_malformed >= 0.0 && st.malformed_fraction() > max_malformed) {
    throw DataQualityError(std::to_string(malformed) + " of " + std::to_string(lines) +
                           " lines malformed");
  }
  return st;
}

}  // namespace forge
