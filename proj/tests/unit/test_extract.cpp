#include <doctest.h>

#include <algorithm>

#include "forge/extractor.hpp"
#include "forge/ingest.hpp"
#include "forge/records.hpp"
#include "forge/tokenize.hpp"
#include "test_util.hpp"

using namespace forge;

namespace {

RawSourceFile file_of(LanguageId lang, std::string path, std::string content) {
  RawSourceFile f;
  f.repo_id = "repo";
  f.rel_path = std::move(path);
  f.language = lang;
  f.content = std::move(content);
  return f;
}

struct Extracted {
  std::vector<ExtractedUnit> units;
  std::vector<InlineSample> blocks;
  std::vector<DroppedUnit> dropped;
  bool rejected = false;
};

Extracted run(const RawSourceFile& f, ExtractOptions opts = {}) {
  Extracted e;
  auto parsed = parse_file(f);
  e.rejected = parsed.rejected;
  if (parsed.rejected) return e;
  e.units = extract_units(parsed.tree, f, opts, &e.dropped);
  e.blocks = extract_inline_blocks(parsed.tree, f);
  return e;
}

const ExtractedUnit* find(const Extracted& e, const std::string& id) {
  for (const auto& u : e.units)
    if (u.identifier == id) return &u;
  return nullptr;
}

}  // namespace

TEST_CASE("empty file parses to an empty root") {
  for (auto lang : kAllLanguages) {
    const auto f = file_of(lang, "x", "");
    auto parsed = parse_file(f);
    CHECK_FALSE(parsed.rejected);
    CHECK(parsed.tree.node(parsed.tree.root()).begin == 0);
    CHECK(parsed.tree.node(parsed.tree.root()).end == 0);
    CHECK(extract_units(parsed.tree, f).empty());
  }
}

TEST_CASE("python function definition node") {
  const auto f = file_of(LanguageId::kPython, "a.py", "def f():\n    pass\n");
  auto parsed = parse_file(f);
  REQUIRE_FALSE(parsed.rejected);
  std::size_t functions = 0;
  for (std::size_t i = 0; i < parsed.tree.size(); ++i)
    functions += parsed.tree.node(static_cast<NodeId>(i)).kind == NodeKind::kFunction;
  CHECK(functions == 1);
  CHECK(parsed.tree.spans_consistent());
  const auto units = extract_units(parsed.tree, f);
  REQUIRE(units.size() == 1);
  CHECK(units[0].identifier == "f");
  CHECK_FALSE(units[0].docstring_raw.has_value());
}

TEST_CASE("random bytes are rejected") {
  std::string junk;
  std::uint32_t x = 12345;
  for (int i = 0; i < 400; ++i) {
    x = x * 1103515245u + 12345u;
    junk += static_cast<char>(33 + (x >> 16) % 94);
  }
  const auto f = file_of(LanguageId::kPython, "junk.py", junk);
  CHECK(parse_file(f).rejected);
}

TEST_CASE("Fig. 2 pattern: documented class and member function") {
  const auto f = file_of(LanguageId::kJava, "A.java",
                         "/**\n * Holds a counter.\n */\n"
                         "public class A {\n"
                         "    /**\n     * Increments the counter.\n     */\n"
                         "    public void inc() { n++; }\n"
                         "}\n");
  const auto e = run(f);
  REQUIRE(e.units.size() == 2);
  CHECK(e.units[0].kind == UnitKind::kClass);
  CHECK(e.units[0].identifier == "A");
  CHECK(e.units[0].docstring_raw == "/**\n * Holds a counter.\n */");
  CHECK(e.units[1].kind == UnitKind::kFunction);
  CHECK(e.units[1].identifier == "inc");
  CHECK(e.units[1].docstring_raw == "/**\n     * Increments the counter.\n     */");
}

TEST_CASE("undocumented function has no docstring") {
  const auto e = run(file_of(LanguageId::kGo, "a.go", "package a\n\nfunc F() int {\n\treturn 1\n}\n"));
  REQUIRE(e.units.size() == 1);
  CHECK_FALSE(e.units[0].docstring_raw.has_value());
  CHECK_FALSE(e.units[0].docstring_tokens.has_value());
}

TEST_CASE("nested definitions are emitted breadth-first") {
  const auto e = run(file_of(LanguageId::kPython, "n.py",
                             "def outer():\n    \"\"\"Outer doc.\"\"\"\n"
                             "    def inner():\n        \"\"\"Inner doc.\"\"\"\n        return 1\n"
                             "    return inner\n\n"
                             "def second():\n    return 2\n"));
  REQUIRE(e.units.size() == 3);
  CHECK(e.units[0].identifier == "outer");
  CHECK(e.units[1].identifier == "second");
  CHECK(e.units[2].identifier == "inner");
  CHECK(e.units[2].docstring_raw == "\"\"\"Inner doc.\"\"\"");
}

TEST_CASE("only an immediately preceding comment is a docstring") {
  const auto e = run(file_of(LanguageId::kC, "a.c",
                             "/* Near comment. */\nint f(void) { return 0; }\n"
                             "/* Far comment. */\n\nint g(void) { return 0; }\n"));
  REQUIRE(e.units.size() == 2);
  CHECK(e.units[0].docstring_raw == "/* Near comment. */");
  CHECK_FALSE(e.units[1].docstring_raw.has_value());
}

TEST_CASE("stacked line comments merge into one docstring") {
  const auto e = run(file_of(LanguageId::kGo, "a.go",
                             "package a\n\n// F returns one.\n// It never fails.\nfunc F() int { return 1 }\n"));
  REQUIRE(e.units.size() == 1);
  CHECK(e.units[0].docstring_raw == "// F returns one.\n// It never fails.");
}

TEST_CASE("C and Go emit no class units") {
  auto e = run(file_of(LanguageId::kC, "a.c", "struct s { int x; };\nint f(void) { return 0; }\n"));
  for (const auto& u : e.units) CHECK(u.kind == UnitKind::kFunction);
  e = run(file_of(LanguageId::kGo, "a.go", "package a\n\n// T doc.\ntype T struct { x int }\n"));
  CHECK(e.units.empty());
}

TEST_CASE("anonymous functions get a synthesized identifier") {
  const auto e = run(file_of(LanguageId::kJavaScript, "a.js",
                             "xs.forEach(function (a) {\n  total += a;\n});\n"));
  bool found = false;
  for (const auto& u : e.units) {
    if (u.anonymous) {
      found = true;
      CHECK(u.identifier.rfind("<anonymous:", 0) == 0);
    }
    CHECK_FALSE(u.identifier.empty());
  }
  CHECK(found);
}

namespace {
// Python class padded with "x = 1" (3 tokens) and "y" (1 token) statements.
std::string python_class(std::size_t triples, std::size_t singles) {
  std::string s = "class C:\n    \"\"\"Docstring for the class C.\"\"\"\n";
  for (std::size_t i = 0; i < triples; ++i) s += "    x = 1\n";
  for (std::size_t i = 0; i < singles; ++i) s += "    y\n";
  return s;
}
}  // namespace

TEST_CASE("class token limit at 5000 and 5001") {
  const auto probe = run(file_of(LanguageId::kPython, "c.py", python_class(0, 1)));
  REQUIRE(probe.units.size() == 1);
  const std::size_t base = probe.units[0].code_tokens.size() - 1;
  const std::size_t triples = (5000 - base) / 3, singles = (5000 - base) % 3;

  ExtractOptions unlimited;
  unlimited.max_class_tokens = static_cast<std::size_t>(-1);
  const auto at = file_of(LanguageId::kPython, "c.py", python_class(triples, singles));
  const auto over = file_of(LanguageId::kPython, "c.py", python_class(triples, singles + 1));
  REQUIRE(run(at, unlimited).units.at(0).code_tokens.size() == 5000);
  REQUIRE(run(over, unlimited).units.at(0).code_tokens.size() == 5001);

  const auto keep = run(at);
  CHECK(keep.units.size() == 1);
  CHECK(keep.dropped.empty());
  const auto drop = run(over);
  CHECK(drop.units.empty());
  REQUIRE(drop.dropped.size() == 1);
  CHECK(drop.dropped[0].reason == "class-token-limit");
}

TEST_CASE("methods of a dropped class are still emitted") {
  std::string src = python_class(1700, 0);
  src += "    def m(self):\n        \"\"\"Method doc.\"\"\"\n        return 1\n";
  const auto e = run(file_of(LanguageId::kPython, "c.py", src));
  REQUIRE(e.dropped.size() == 1);
  REQUIRE(e.units.size() == 1);
  CHECK(e.units[0].identifier == "m");
}

TEST_CASE("inline comment with context") {
  const auto e = run(file_of(LanguageId::kPython, "a.py",
                             "def f():\n    x=1\n    # add one\n    x+=1\n"));
  REQUIRE(e.blocks.size() == 1);
  CHECK(e.blocks[0].comment == "add one");
  CHECK(e.blocks[0].prev_context == "x=1");
  CHECK(e.blocks[0].next_context == "x+=1");
  CHECK(e.blocks[0].enclosing_identifier == "f");
}

TEST_CASE("inline comment at body start") {
  const auto e = run(file_of(LanguageId::kJava, "A.java",
                             "class A {\n  void f() {\n    // set up the counter here\n    int x = 0;\n  }\n}\n"));
  REQUIRE(e.blocks.size() == 1);
  CHECK(e.blocks[0].prev_context.empty());
  CHECK(e.blocks[0].next_context == "int x = 0;");
}

TEST_CASE("consecutive comment lines merge; no comments gives no samples") {
  auto e = run(file_of(LanguageId::kPython, "a.py",
                       "def f():\n    a = 1\n    # first line\n    # second line\n    return a\n"));
  REQUIRE(e.blocks.size() == 1);
  CHECK(e.blocks[0].comment == "first line\nsecond line");
  e = run(file_of(LanguageId::kPython, "a.py", "def f():\n    return 1\n"));
  CHECK(e.blocks.empty());
}

TEST_CASE("tokenize_code examples") {
  CHECK(tokenize_code("pass", LanguageId::kPython).tokens == std::vector<std::string>{"pass"});
  CHECK(tokenize_code("x = 1 + 2", LanguageId::kPython).tokens ==
        std::vector<std::string>{"x", "=", "1", "+", "2"});
  CHECK(tokenize_code("", LanguageId::kPython).tokens.empty());
  CHECK(tokenize_code("a = 1 # note", LanguageId::kPython).tokens ==
        std::vector<std::string>{"a", "=", "1"});
  CHECK(tokenize_code("int x = 0; /* c */ // d", LanguageId::kC).tokens ==
        std::vector<std::string>{"int", "x", "=", "0", ";"});
}

TEST_CASE("fixture corpus: extraction equals goldens, spans are exact") {
  ScanOptions o;
  o.include_langs = {kAllLanguages.begin(), kAllLanguages.end()};
  const auto files = scan_corpus({testutil::fixtures() / "corpus"}, o);
  std::vector<std::string> units, blocks;
  std::map<LanguageId, std::size_t> per_lang;
  for (const auto& f : files) {
    auto parsed = parse_file(f);
    REQUIRE_FALSE(parsed.rejected);
    for (const auto& u : extract_units(parsed.tree, f)) {
      // Span fidelity: code is the exact source substring at code_span.
      CHECK(u.code == f.content.substr(u.start_byte, u.end_byte - u.start_byte));
      CHECK(u.end_byte <= f.content.size());
      ++per_lang[u.language];
      units.push_back(dump_line(unit_to_json(u)));
    }
    for (const auto& b : extract_inline_blocks(parsed.tree, f)) {
      CHECK(f.content.find(b.prev_context) != std::string::npos);
      CHECK(f.content.find(b.next_context) != std::string::npos);
      CHECK_FALSE((b.prev_context.empty() && b.next_context.empty()));
      blocks.push_back(dump_line(inline_to_json(b)));
    }
  }
  for (auto l : kAllLanguages) CHECK(per_lang[l] >= 3);
  const auto golden_units = testutil::read_lines(testutil::fixtures() / "golden" / "units.jsonl");
  const auto golden_blocks = testutil::read_lines(testutil::fixtures() / "golden" / "blocks.jsonl");
  REQUIRE(units.size() == golden_units.size());
  for (std::size_t i = 0; i < units.size(); ++i) CHECK(units[i] == golden_units[i]);
  REQUIRE(blocks.size() == golden_blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) CHECK(blocks[i] == golden_blocks[i]);
}

TEST_CASE("unit records round trip through JSON") {
  const auto e = run(file_of(LanguageId::kRuby, "s.rb",
                             "# Pushes a value onto the stack.\ndef push(v)\n  @a << v\nend\n"));
  REQUIRE(e.units.size() == 1);
  const auto j = unit_to_json(e.units[0]);
  CHECK(j["schema"] == 1);
  const auto back = unit_from_json(j);
  CHECK(dump_line(unit_to_json(back)) == dump_line(j));
}
