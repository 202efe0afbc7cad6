#include <doctest.h>

#include <random>
#include <set>

#include "docgen.hpp"
#include "forge/extractor.hpp"
#include "forge/filters.hpp"
#include "forge/records.hpp"
#include "forge/tokenize.hpp"
#include "synth.hpp"
#include "test_util.hpp"

using namespace forge;

TEST_CASE("update filters are idempotent and never lengthen the text") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 3000; ++i) {
    const auto t = testutil::random_docstring(rng);
    const auto n = normalize_text(t);
    for (auto id : kUpdateOrder) {
      const auto once = apply_update_filter(id, n);
      INFO(filter_name(id) << " on [" << t << "]");
      CHECK(apply_update_filter(id, once) == once);
      CHECK(once.size() <= n.size());
    }
  }
}

TEST_CASE("remove filters are pure and the first hit is in chain order") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 1000; ++i) {
    const auto u = apply_update_filters(testutil::random_docstring(rng));
    const auto toks = tokenize_text(u.text);
    const auto a = apply_remove_filters(toks, u.text);
    CHECK(a == apply_remove_filters(toks, u.text));
    if (a) {
      // Disabling every earlier remove filter leaves the verdict unchanged.
      FilterConfig cfg;
      for (auto id : kRemoveOrder) {
        if (id == *a) break;
        cfg.enabled[static_cast<std::size_t>(id)] = false;
      }
      CHECK(apply_remove_filters(toks, u.text, cfg) == a);
    }
  }
}

TEST_CASE("clean_pair traces are consistent") {
  std::mt19937_64 rng(5);
  FilterReport report;
  std::size_t kept = 0, n = 0;
  for (int i = 0; i < 1000; ++i) {
    ExtractedUnit u;
    u.repo_id = "r";
    u.rel_path = "f.py";
    u.start_byte = static_cast<std::uint32_t>(i);
    u.language = kAllLanguages[static_cast<std::size_t>(i) % kAllLanguages.size()];
    u.docstring_raw = testutil::random_docstring(rng);
    const auto t = clean_pair(u);
    CHECK(t.removed_by.has_value() != t.text_after.has_value());
    for (auto id : t.applied) CHECK(is_update_filter(id));
    if (t.removed_by) CHECK_FALSE(is_update_filter(*t.removed_by));
    report.add_inputs(u.language);
    report.add(t);
    ++n;
    kept += !t.removed_by;
  }
  CHECK(report.inputs() == n);
  CHECK(report.kept() == kept);
  CHECK(report.kept() + report.dropped() == report.inputs());
}

TEST_CASE("extraction invariants on generated sources") {
  std::mt19937_64 rng(31);
  const std::vector<std::string> kw = {"def", "class", "if", "return", "x", "=", "(", ")", ":", "\n",
                                       "    ", "#", "'", "\"", "{", "}", ";", "/*", "*/", "//", "\"\"\""};
  for (int i = 0; i < 400; ++i) {
    std::string src;
    const auto len = rng() % 120;
    for (std::size_t k = 0; k < len; ++k) {
      src += kw[rng() % kw.size()];
      src += ' ';
    }
    RawSourceFile f;
    f.repo_id = "r";
    f.rel_path = "g";
    f.language = kAllLanguages[rng() % kAllLanguages.size()];
    f.content = src;
    const auto parsed = parse_file(f);
    if (parsed.rejected) continue;
    CHECK(parsed.tree.spans_consistent());
    for (const auto& u : extract_units(parsed.tree, f)) {
      REQUIRE(u.end_byte <= src.size());
      CHECK(u.code == src.substr(u.start_byte, u.end_byte - u.start_byte));
      CHECK_FALSE(u.identifier.empty());
    }
    for (const auto& b : extract_inline_blocks(parsed.tree, f)) CHECK(b.start_byte <= b.end_byte);
  }
}

TEST_CASE("tokenizers are deterministic") {
  for (const auto& s : testutil::synth_pairs(200, 3)) {
    CHECK(tokenize_code(s.pair.code, s.pair.language).tokens ==
          tokenize_code(s.pair.code, s.pair.language).tokens);
    CHECK(tokenize_text(s.pair.docstring) == tokenize_text(s.pair.docstring));
  }
}

TEST_CASE("dump_line replaces invalid UTF-8") {
  const auto line = dump_line(nlohmann::json{{"s", std::string("ok\xff\xfe")}});
  CHECK(nlohmann::json::parse(line)["s"].get<std::string>().rfind("ok", 0) == 0);
}
