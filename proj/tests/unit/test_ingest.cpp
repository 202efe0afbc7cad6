#include <doctest.h>

#include <sstream>

#include "forge/error.hpp"
#include "forge/ingest.hpp"
#include "forge/language.hpp"
#include "test_util.hpp"

using namespace forge;
namespace fs = std::filesystem;

namespace {
ScanOptions all_langs() {
  ScanOptions o;
  o.include_langs = {kAllLanguages.begin(), kAllLanguages.end()};
  return o;
}
}  // namespace

TEST_CASE("extension map") {
  CHECK(detect_language("src/main.rs") == LanguageId::kRust);
  CHECK_FALSE(detect_language("README.md").has_value());
  CHECK(detect_language("lib/util.cc") == LanguageId::kCpp);
  CHECK(detect_language("a/b.h") == LanguageId::kC);
  CHECK(detect_language("x.hpp") == LanguageId::kCpp);
  CHECK(detect_language("x.cpp") == LanguageId::kCpp);
  CHECK(detect_language("x.py") == LanguageId::kPython);
  CHECK(detect_language("x.java") == LanguageId::kJava);
  CHECK(detect_language("x.js") == LanguageId::kJavaScript);
  CHECK(detect_language("x.php") == LanguageId::kPhp);
  CHECK(detect_language("x.c") == LanguageId::kC);
  CHECK(detect_language("x.cs") == LanguageId::kCSharp);
  CHECK(detect_language("x.go") == LanguageId::kGo);
  CHECK(detect_language("x.rb") == LanguageId::kRuby);
  CHECK_FALSE(detect_language("Makefile").has_value());
  CHECK_FALSE(detect_language("x.pyc").has_value());
}

TEST_CASE("language names round trip") {
  for (auto l : kAllLanguages) CHECK(parse_language(language_name(l)) == l);
  CHECK(parse_language("c++") == LanguageId::kCpp);
  CHECK_THROWS_AS(parse_language_list("python,cobol"), ConfigError);
  CHECK(parse_language_list("python,go").size() == 2);
}

TEST_CASE("empty directory gives empty stream") {
  const auto root = testutil::temp_dir("ingest_empty");
  ScanStats st;
  const auto files = scan_corpus({root}, all_langs(), &st);
  CHECK(files.empty());
  CHECK(st.matched == 0);
}

TEST_CASE("extension filter") {
  const auto root = testutil::temp_dir("ingest_filter");
  testutil::write_file(root / "repo" / "a.py", "x = 1\n");
  testutil::write_file(root / "repo" / "b.txt", "hello\n");
  ScanOptions o;
  o.include_langs = {LanguageId::kPython};
  const auto files = scan_corpus({root}, o);
  REQUIRE(files.size() == 1);
  CHECK(files[0].rel_path == "a.py");
  CHECK(files[0].repo_id == "repo");
  CHECK(files[0].language == LanguageId::kPython);
}

TEST_CASE("three repos with two files each") {
  const auto root = testutil::temp_dir("ingest_three");
  for (const char* repo : {"zeta", "alpha", "mid"}) {
    testutil::write_file(root / repo / "src" / "b.go", "package b\n");
    testutil::write_file(root / repo / "a.rs", "fn a() {}\n");
  }
  const auto files = scan_corpus({root}, all_langs());
  REQUIRE(files.size() == 6);
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"alpha", "a.rs"}, {"alpha", "src/b.go"}, {"mid", "a.rs"},
      {"mid", "src/b.go"}, {"zeta", "a.rs"}, {"zeta", "src/b.go"}};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(files[i].repo_id == expected[i].first);
    CHECK(files[i].rel_path == expected[i].second);
  }
}

TEST_CASE("scan is deterministic and complete") {
  const auto root = testutil::fixtures() / "corpus";
  ScanStats a, b;
  const auto f1 = scan_corpus({root}, all_langs(), &a);
  const auto f2 = scan_corpus({root}, all_langs(), &b);
  REQUIRE(f1.size() == f2.size());
  std::ostringstream s1, s2;
  for (const auto& f : f1) write_raw_record(s1, f);
  for (const auto& f : f2) write_raw_record(s2, f);
  CHECK(s1.str() == s2.str());
  CHECK(a.emitted + a.skipped() == a.matched);
  CHECK(a.emitted == 11);
}

TEST_CASE("oversized and binary files are skipped and counted") {
  const auto root = testutil::temp_dir("ingest_skip");
  testutil::write_file(root / "r" / "big.py", std::string(2000, '#'));
  testutil::write_file(root / "r" / "bin.c", std::string("\x00\x01\x02\x00\xff\xfe", 6));
  testutil::write_file(root / "r" / "ok.py", "pass\n");
  auto o = all_langs();
  o.max_file_bytes = 1000;
  ScanStats st;
  const auto files = scan_corpus({root}, o, &st);
  CHECK(files.size() == 1);
  CHECK(st.skipped_too_large == 1);
  CHECK(st.skipped_undecodable == 1);
  CHECK(st.matched == st.emitted + st.skipped());
}

TEST_CASE("missing root is a stage error") {
  CHECK_THROWS_AS(scan_corpus({"/nonexistent/forge/root"}, all_langs()), StageError);
}

TEST_CASE("manifest records are ingested with their repo key") {
  const auto dir = testutil::temp_dir("ingest_manifest");
  testutil::write_file(dir / "corpus.jsonl",
                       "{\"repo\":\"org/name\",\"path\":\"m.py\",\"content\":\"def f():\\n    pass\\n\"}\n"
                       "{\"repo\":\"org/name\",\"path\":\"README\",\"content\":\"x\"}\n");
  auto o = all_langs();
  o.manifests = {dir / "corpus.jsonl"};
  const auto files = scan_corpus({}, o);
  REQUIRE(files.size() == 1);
  CHECK(files[0].repo_id == "org/name");
  CHECK(files[0].content == "def f():\n    pass\n");
}

TEST_CASE("raw record line shape") {
  RawSourceFile f{"r", "a.py", LanguageId::kPython, "x", 0x1234};
  std::ostringstream s;
  write_raw_record(s, f);
  CHECK(s.str() ==
        "{\"repo\":\"r\",\"path\":\"a.py\",\"language\":\"python\",\"content_hash\":\"0000000000001234\"}\n");
}
