#include <doctest.h>

#include <random>
#include <set>

#include "forge/error.hpp"
#include "forge/stats.hpp"
#include "test_util.hpp"

using namespace forge;
using nlohmann::json;

namespace {

json unit(const std::string& lang, const std::string& repo, const std::string& id,
          std::vector<std::string> code, std::optional<std::vector<std::string>> doc,
          const std::string& style = "google") {
  json r = {{"schema", 1}, {"key", repo + "/" + id}, {"repo", repo}, {"language", lang},
            {"identifier", id}, {"code_tokens", code}};
  if (doc) {
    r["docstring"] = "text";
    r["docstring_tokens"] = *doc;
    r["docstring_params"] = {{"style", style}};
  } else {
    r["docstring"] = nullptr;
    r["docstring_tokens"] = nullptr;
  }
  return r;
}

std::size_t brute_bin(std::size_t n) {
  const std::size_t edges[] = {8, 16, 32, 64, 128, 256, 512, 1024};
  std::size_t b = 0;
  for (auto e : edges)
    if (n >= e) ++b;
  return b;
}

}  // namespace

TEST_CASE("histogram bins") {
  for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 15u, 16u, 100u, 511u, 512u, 1023u, 1024u, 50000u})
    CHECK(histogram_bin(n) == brute_bin(n));
}

TEST_CASE("empty dataset is all zeros") {
  const auto d = testutil::temp_dir("stats_empty");
  testutil::write_file(d / "e.jsonl", "");
  const auto st = compute_stats({d / "e.jsonl"});
  CHECK(st.languages.empty());
  CHECK(st.all == LanguageStats{});
  CHECK(st.lines == 0);
  CHECK(st.malformed_fraction() == 0.0);
}

TEST_CASE("three records sharing one identifier") {
  StatsAccumulator acc;
  for (int i = 0; i < 3; ++i) acc.add(unit("python", "r", "run", {"a"}, std::nullopt));
  const auto st = acc.finish();
  CHECK(st.all.unique_identifiers == 1);
  CHECK(st.languages.at("python").n_total == 3);
  CHECK(st.languages.at("python").n_with_docstring == 0);
}

TEST_CASE("anonymous identifiers and block records") {
  StatsAccumulator acc;
  acc.add(unit("javascript", "r", "<anonymous:3>", {"x"}, std::nullopt));
  acc.add(json{{"schema", 1}, {"repo", "r2"}, {"language", "javascript"}, {"comment", "add one"},
               {"comment_tokens", {"add", "one"}}});
  const auto st = acc.finish().languages.at("javascript");
  CHECK(st.unique_identifiers == 0);
  CHECK(st.n_blocks == 1);
  CHECK(st.n_total == 1);
  CHECK(st.n_repos == 2);
  CHECK(st.unique_docstring_tokens == 2);
}

TEST_CASE("100 records: counts equal a brute-force recount") {
  std::mt19937_64 rng(12);
  const std::vector<std::string> langs = {"python", "go", "rust"};
  const std::vector<std::string> styles = {"google", "numpy", "unstyled"};
  std::vector<json> recs;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> code, doc;
    const auto nc = rng() % 700, nd = rng() % 40;
    for (std::size_t k = 0; k < nc; ++k) code.push_back("c" + std::to_string(rng() % 500));
    for (std::size_t k = 0; k < nd; ++k) doc.push_back("d" + std::to_string(rng() % 200));
    const bool has_doc = rng() % 3 != 0;
    recs.push_back(unit(langs[rng() % 3], "repo" + std::to_string(rng() % 17),
                        "f" + std::to_string(rng() % 60), code,
                        has_doc ? std::optional(doc) : std::nullopt, styles[rng() % 3]));
  }
  const auto d = testutil::temp_dir("stats_recount");
  std::string text;
  for (const auto& r : recs) text += r.dump() + "\n";
  testutil::write_file(d / "a.jsonl", text);
  const auto st = compute_stats({d / "a.jsonl"});

  for (const auto& lang : langs) {
    std::set<std::string> repos, ct, dt, ids;
    std::size_t total = 0, with_doc = 0;
    std::map<std::string, std::size_t> sty;
    std::array<std::size_t, 9> ch{}, dh{};
    for (const auto& r : recs) {
      if (r["language"] != lang) continue;
      ++total;
      repos.insert(r["repo"]);
      ids.insert(r["identifier"]);
      for (const auto& t : r["code_tokens"]) ct.insert(t);
      ++ch[brute_bin(r["code_tokens"].size())];
      if (r["docstring"].is_null()) continue;
      ++with_doc;
      for (const auto& t : r["docstring_tokens"]) dt.insert(t);
      ++dh[brute_bin(r["docstring_tokens"].size())];
      ++sty[r["docstring_params"]["style"]];
    }
    const auto& s = st.languages.at(lang);
    CHECK(s.n_total == total);
    CHECK(s.n_with_docstring == with_doc);
    CHECK(s.n_repos == repos.size());
    CHECK(s.unique_code_tokens == ct.size());
    CHECK(s.unique_docstring_tokens == dt.size());
    CHECK(s.unique_identifiers == ids.size());
    CHECK(s.styles == sty);
    for (std::size_t b = 0; b < 9; ++b) {
      CHECK(s.code_length[b] == ch[b]);
      CHECK(s.docstring_length[b] == dh[b]);
    }
  }
  std::size_t mass = 0;
  for (auto c : st.all.code_length) mass += c;
  CHECK(mass == 100);
  CHECK(st.all.n_with_docstring <= st.all.n_total);
  // Idempotence.
  CHECK(compute_stats({d / "a.jsonl"}) == st);
  const auto csv = st.to_csv();
  CHECK(csv.find("\nall,") != std::string::npos);
  CHECK(csv.find("\npython,") != std::string::npos);
}

TEST_CASE("malformed lines are skipped and counted") {
  const auto d = testutil::temp_dir("stats_bad");
  std::string text;
  for (int i = 0; i < 99; ++i) text += unit("go", "r", "f", {"a"}, std::nullopt).dump() + "\n";
  text += "{not json\n";
  testutil::write_file(d / "ok.jsonl", text);
  const auto st = compute_stats({d / "ok.jsonl"});
  CHECK(st.lines == 100);
  CHECK(st.malformed == 1);
  CHECK(st.all.n_total == 99);

  // Two bad lines in 100: above 1%.
  text += "[1,2]\n";
  testutil::write_file(d / "bad.jsonl", text);
  CHECK_THROWS_AS(compute_stats({d / "bad.jsonl"}), DataQualityError);
  const auto lenient = compute_stats({d / "bad.jsonl"}, -1);
  CHECK(lenient.malformed == 2);

  // A record missing required fields counts as malformed, with no partial counts.
  StatsAccumulator acc;
  CHECK_THROWS(acc.add(json{{"language", "go"}, {"repo", "r"}, {"code_tokens", {"a"}}}));
  CHECK(acc.finish().all == LanguageStats{});
}
