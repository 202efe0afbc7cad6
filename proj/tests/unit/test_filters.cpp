#include <doctest.h>

#include <random>

#include "forge/error.hpp"
#include "forge/filters.hpp"
#include "forge/tokenize.hpp"

using namespace forge;

namespace {

struct Golden {
  const char* input;
  const char* output;
  std::vector<FilterId> applied;
};

const std::vector<Golden>& update_goldens() {
  static const std::vector<Golden> g = {
      {"/**\n* Lexical essentially tokenizer.\n*\n*/", "Lexical essentially tokenizer.",
       {FilterId::kStripDelimiters}},
      {"Deletes a Mux asset\n@see https://docs.mux.com/v1/reference#deletean-asset",
       "Deletes a Mux asset", {FilterId::kStripHyperlink}},
      {"isup <url> - Is it down for everyone, or just you?", "isup <url>",
       {FilterId::kHandleQuestions}},
      {"Constructs a <code>GeneralStoresProductModel</code> from a plain JavaScript object.",
       "Constructs a GeneralStoresProductModel from a plain JavaScript object.",
       {FilterId::kStripHtmlTags}},
      {"Pull packages data dir.\nnote: Uses su to access package's data dir.",
       "Pull packages data dir.", {FilterId::kHandleExamplesNotes}},
      {"Set the trust level for a key in GPG keychain.\ncode-block:: bash\n salt '*' "
       "gpg.trust-key key-id='3FAD9F1E'\ntrust-level='marginally'",
       "Set the trust level for a key in GPG keychain.\ncode-block:: bash",
       {FilterId::kStripEmbeddedCode}},
      {"Recursive filter design using a least-squares method.\n[B,A] = YULEWALK(N,F,M) finds "
       "the N-th order\nrecursive filter coefficients B and A.",
       "Recursive filter design using a least-squares method.", {FilterId::kStripMathFormulas}},
      {"Creates a slice of `array' with `n' elements dropped\nfrom the end.\n@static\n"
       "@memberOf _\n@since 3.0.0",
       "Creates a slice of `array' with `n' elements dropped\nfrom the end.",
       {FilterId::kStripMetadataTags}},
  };
  return g;
}

std::string words(std::size_t n) {
  static const char* pool[] = {"the", "value", "of", "a", "list", "is", "returned", "here"};
  std::string s = "Returns";
  for (std::size_t i = 1; i < n; ++i) {
    s += ' ';
    s += pool[i % 8];
  }
  return s;
}

}  // namespace

TEST_CASE("update filter goldens") {
  for (const auto& g : update_goldens()) {
    INFO(g.input);
    const auto r = apply_update_filters(g.input);
    CHECK(r.text == g.output);
    CHECK(r.applied == g.applied);
  }
}

TEST_CASE("remove filter goldens") {
  auto verdict = [](const std::string& raw) {
    const auto u = apply_update_filters(raw);
    return apply_remove_filters(tokenize_text(u.text), u.text);
  };
  CHECK(verdict("") == FilterId::kRemoveEmpty);
  CHECK(verdict("/** */") == FilterId::kRemoveEmpty);
  CHECK(verdict("Write objects") == FilterId::kRemoveBadLength);
  CHECK(verdict("Retorna uma estrutura com os argumentos passados para o programa.") ==
        FilterId::kRemoveNonEnglish);
  CHECK(verdict("Retorna uma estrutura com os argumentos\npassados para o programa.") ==
        FilterId::kRemoveNonEnglish);
  CHECK(verdict("<!-begin-user-doc-> <!-end-user-doc-> @generated") == FilterId::kRemoveAutoGen);
  CHECK(verdict("*<!-begin-user-doc->\n<!-end-user-doc->\n@generated") == FilterId::kRemoveAutoGen);
  CHECK(verdict("Deprecate this build, so that it will be rebuilt if\nany other test run wants to use it.") ==
        FilterId::kRemoveWip);
  CHECK_FALSE(verdict("Returns the number of elements in this list.").has_value());
}

TEST_CASE("filter order constants") {
  CHECK(kUpdateOrder.size() + kRemoveOrder.size() == kFilterCount);
  for (auto id : kUpdateOrder) CHECK(is_update_filter(id));
  for (auto id : kRemoveOrder) CHECK_FALSE(is_update_filter(id));
  for (auto id : kAllFilters) CHECK(parse_filter_name(filter_name(id)) == id);
}

TEST_CASE("docstring length bounds") {
  auto check = [](std::size_t n) {
    const auto text = words(n);
    const auto toks = tokenize_text(text);
    REQUIRE(toks.size() == n);
    return apply_remove_filters(toks, text);
  };
  CHECK(check(4) == FilterId::kRemoveBadLength);
  CHECK_FALSE(check(5).has_value());
  CHECK_FALSE(check(500).has_value());
  CHECK(check(501) == FilterId::kRemoveBadLength);
}

TEST_CASE("inline comment length bounds") {
  auto check = [](std::size_t n) {
    const auto text = words(n);
    const auto toks = tokenize_text(text);
    REQUIRE(toks.size() == n);
    return apply_inline_remove_filters(toks, text);
  };
  CHECK(check(2) == FilterId::kRemoveBadLength);
  CHECK_FALSE(check(3).has_value());
  CHECK_FALSE(check(15).has_value());
  CHECK(check(16) == FilterId::kRemoveBadLength);
}

TEST_CASE("clean_pair composition") {
  ExtractedUnit u;
  u.repo_id = "r";
  u.rel_path = "a.java";
  u.language = LanguageId::kJava;
  u.docstring_raw = "/** */";
  auto t = clean_pair(u);
  CHECK(t.applied == std::vector<FilterId>{FilterId::kStripDelimiters});
  CHECK(t.removed_by == FilterId::kRemoveEmpty);
  CHECK_FALSE(t.text_after.has_value());

  u.docstring_raw = "Returns the number of elements in this list.";
  t = clean_pair(u);
  CHECK(t.applied.empty());
  CHECK_FALSE(t.removed_by.has_value());
  CHECK(t.text_after == "Returns the number of elements in this list.");
  CHECK(u.docstring_tokens == tokenize_text(*t.text_after));

  u.docstring_raw = "Pull packages data dir.\nnote: Uses su to access package's data dir.";
  t = clean_pair(u);
  CHECK(t.applied == std::vector<FilterId>{FilterId::kHandleExamplesNotes});
  CHECK_FALSE(t.removed_by.has_value());
  CHECK(t.text_after == "Pull packages data dir.");
  CHECK(t.key == u.key());
}

TEST_CASE("disabled filters do not run") {
  FilterConfig cfg;
  cfg.enabled[static_cast<std::size_t>(FilterId::kStripHtmlTags)] = false;
  const auto r = apply_update_filters(
      "Constructs a <code>GeneralStoresProductModel</code> from a plain JavaScript object.", cfg);
  CHECK(r.applied.empty());
  cfg.enabled[static_cast<std::size_t>(FilterId::kRemoveBadLength)] = false;
  CHECK_FALSE(apply_remove_filters({"Write", "objects"}, "Write objects", cfg).has_value());
}

TEST_CASE("filter config parsing") {
  auto cfg = FilterConfig::from_json(nlohmann::json::parse(
      R"({"enabled": {"RemoveWip": false}, "length": {"min": 3, "max": 40},
          "english_threshold": 0.7, "wip_patterns": ["XXX"]})"));
  CHECK_FALSE(cfg.is_enabled(FilterId::kRemoveWip));
  CHECK(cfg.is_enabled(FilterId::kRemoveEmpty));
  CHECK(cfg.min_tokens == 3);
  CHECK(cfg.max_tokens == 40);
  CHECK(cfg.english_threshold == doctest::Approx(0.7));
  CHECK(cfg.wip_patterns == std::vector<std::string>{"XXX"});
  CHECK(FilterConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());

  CHECK_THROWS_AS(FilterConfig::from_json(nlohmann::json::parse(R"({"lenght": {}})")), ConfigError);
  CHECK_THROWS_AS(FilterConfig::from_json(nlohmann::json::parse(R"({"enabled": {"Nope": true}})")),
                  ConfigError);
  CHECK_THROWS_AS(FilterConfig::from_json(nlohmann::json::parse(R"({"length": {"min": 9, "max": 2}})")),
                  ConfigError);
  CHECK_THROWS_AS(FilterConfig::from_json(nlohmann::json::parse(R"({"english_threshold": 2})")),
                  ConfigError);
  CHECK_THROWS_AS(FilterConfig::from_json(nlohmann::json::parse(R"({"wip_patterns": [""]})")),
                  ConfigError);
}

TEST_CASE("filter report arithmetic") {
  FilterReport empty;
  empty.add_inputs(LanguageId::kPython, 100);
  for (auto id : kAllFilters) CHECK(empty.percentage(id) == 0.0);
  CHECK(empty.kept() == 100);

  FilterReport r;
  r.add_inputs(LanguageId::kGo, 10);
  for (int i = 0; i < 7; ++i) {
    FilterTrace t;
    t.language = LanguageId::kGo;
    t.removed_by = FilterId::kRemoveEmpty;
    r.add(t);
  }
  CHECK(r.percentage(FilterId::kRemoveEmpty) == doctest::Approx(70.0));
  CHECK(r.percentage(FilterId::kRemoveEmpty, LanguageId::kGo) == doctest::Approx(70.0));
  CHECK(r.dropped() == 7);
  CHECK(r.kept() == 3);
  CHECK(r.to_csv().find("RemoveEmpty,70.00,70.00\n") != std::string::npos);
}

TEST_CASE("planted noise corpus: report equals planted counts") {
  // Each planted docstring triggers exactly one filter.
  const std::vector<std::pair<FilterId, std::string>> plants = {
      {FilterId::kStripHyperlink, "Returns the number of open files.\nSee https://example.org/x"},
      {FilterId::kStripHtmlTags, "Returns the <b>number</b> of open files in the table."},
      {FilterId::kHandleQuestions, "Returns the number of open files. Why is it slow?"},
      {FilterId::kRemoveBadLength, "Open files"},
      {FilterId::kRemoveAutoGen, "Returns the number of open files. @generated"},
      {FilterId::kRemoveWip, "TODO: returns the number of open files somehow."},
  };
  const std::string clean = "Returns the number of open files in the table.";
  std::mt19937_64 rng(7);
  std::map<LanguageId, std::size_t> totals;
  std::map<std::pair<LanguageId, FilterId>, std::size_t> planted;
  FilterReport report;
  for (int i = 0; i < 600; ++i) {
    const auto lang = kAllLanguages[rng() % kAllLanguages.size()];
    ExtractedUnit u;
    u.repo_id = "r";
    u.start_byte = static_cast<std::uint32_t>(i);
    u.language = lang;
    const auto pick = rng() % (plants.size() + 2);
    if (pick < plants.size()) {
      u.docstring_raw = plants[pick].second;
      ++planted[{lang, plants[pick].first}];
    } else {
      u.docstring_raw = clean;
    }
    report.add_inputs(lang);
    ++totals[lang];
    report.add(clean_pair(u));
  }
  for (auto lang : kAllLanguages) {
    if (!totals[lang]) continue;
    CHECK(report.inputs(lang) == totals[lang]);
    for (auto id : kAllFilters) {
      const auto it = planted.find({lang, id});
      const std::size_t expect = it == planted.end() ? 0 : it->second;
      INFO(language_name(lang) << " " << filter_name(id));
      CHECK(report.touched(id, lang) == expect);
      CHECK(report.percentage(id, lang) ==
            doctest::Approx(100.0 * static_cast<double>(expect) / static_cast<double>(totals[lang])));
    }
    CHECK(report.kept(lang) + report.dropped(lang) == report.inputs(lang));
  }
}

TEST_CASE("report merge is associative and commutative") {
  FilterReport a, b, c;
  FilterTrace t;
  t.language = LanguageId::kRust;
  t.applied = {FilterId::kStripDelimiters};
  a.add_inputs(LanguageId::kRust, 3);
  a.add(t);
  b.add_inputs(LanguageId::kPhp, 2);
  t.language = LanguageId::kPhp;
  t.removed_by = FilterId::kRemoveWip;
  b.add(t);
  c.add_inputs(LanguageId::kRust, 1);

  FilterReport ab_c = a;
  ab_c.merge(b);
  ab_c.merge(c);
  FilterReport bc = b;
  bc.merge(c);
  FilterReport a_bc = a;
  a_bc.merge(bc);
  CHECK(ab_c == a_bc);
  FilterReport ba = b;
  ba.merge(a);
  FilterReport ab = a;
  ab.merge(b);
  CHECK(ab == ba);
}
