#include "forge/docstring.hpp"

#include <array>
#include <regex>

#include "text_util.hpp"

namespace forge {
namespace {

using text::blank;
using text::indent_of;
using text::trim;

enum class Section { kParams, kReturns, kRaises, kOther };

struct SectionName {
  std::string_view name;
  Section kind;
};

constexpr std::array<SectionName, 26> kGoogleSections = {{
    {"Args", Section::kParams},
    {"Arguments", Section::kParams},
    {"Parameters", Section::kParams},
    {"Params", Section::kParams},
    {"Keyword Args", Section::kParams},
    {"Keyword Arguments", Section::kParams},
    {"Other Parameters", Section::kParams},
    {"Returns", Section::kReturns},
    {"Return", Section::kReturns},
    {"Yields", Section::kReturns},
    {"Yield", Section::kReturns},
    {"Raises", Section::kRaises},
    {"Raise", Section::kRaises},
    {"Exceptions", Section::kRaises},
    {"Attributes", Section::kOther},
    {"Example", Section::kOther},
    {"Examples", Section::kOther},
    {"Note", Section::kOther},
    {"Notes", Section::kOther},
    {"Todo", Section::kOther},
    {"Warning", Section::kOther},
    {"Warnings", Section::kOther},
    {"See Also", Section::kOther},
    {"References", Section::kOther},
    {"Methods", Section::kOther},
    {"Warns", Section::kOther},
}};

constexpr std::array<SectionName, 15> kNumpySections = {{
    {"Parameters", Section::kParams},
    {"Other Parameters", Section::kParams},
    {"Receives", Section::kParams},
    {"Returns", Section::kReturns},
    {"Yields", Section::kReturns},
    {"Raises", Section::kRaises},
    {"Warns", Section::kOther},
    {"Warnings", Section::kOther},
    {"See Also", Section::kOther},
    {"Notes", Section::kOther},
    {"References", Section::kOther},
    {"Examples", Section::kOther},
    {"Attributes", Section::kOther},
    {"Methods", Section::kOther},
    {"Example", Section::kOther},
}};

template <std::size_t N>
std::optional<Section> lookup(const std::array<SectionName, N>& table,
                              std::string_view name) {
  for (const auto& s : table)
    if (s.name == name) return s.kind;
  return std::nullopt;
}

void append(std::string& dst, std::string_view piece, std::string_view sep) {
  if (piece.empty()) return;
  if (!dst.empty()) dst += sep;
  dst += piece;
}

void add_other(DocstringMetadata& md, const std::string& key,
               std::string_view value) {
  auto& slot = md.other_tags[key];
  if (!slot.empty()) slot += '\n';
  slot += value;
}

// ---- Google ---------------------------------------------------------------

bool google_header(const std::string& line, std::string* name) {
  if (indent_of(line) != 0) return false;
  const auto t = text::rtrim(line);
  if (t.size() < 2 || t.back() != ':') return false;
  const auto n = t.substr(0, t.size() - 1);
  if (!lookup(kGoogleSections, n)) return false;
  if (name) *name = std::string(n);
  return true;
}

bool match_google(const std::vector<std::string>& lines) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!google_header(lines[i], nullptr)) continue;
    std::size_t j = i + 1;
    while (j < lines.size() && blank(lines[j])) ++j;
    if (j < lines.size() && indent_of(lines[j]) > 0) return true;
  }
  return false;
}

// Entry lines sit at the section's base indentation; deeper lines continue
// the previous entry. Returns false on a line that matches no entry.
template <typename OnEntry, typename OnMore>
bool walk_entries(const std::vector<std::string>& body, const std::regex& re,
                  OnEntry on_entry, OnMore on_more) {
  std::size_t base = static_cast<std::size_t>(-1);
  for (const auto& l : body)
    if (!blank(l)) base = std::min(base, indent_of(l));
  bool have = false;
  for (const auto& l : body) {
    if (blank(l)) continue;
    if (indent_of(l) == base) {
      std::smatch m;
      const std::string t(trim(l));
      if (!std::regex_match(t, m, re)) return false;
      on_entry(m);
      have = true;
    } else {
      if (!have) return false;
      on_more(std::string(trim(l)));
    }
  }
  return have;
}

const std::regex& google_param_re() {
  static const std::regex re(
      R"(^(\*{0,2}[A-Za-z_][A-Za-z0-9_.]*)\s*(?:\(([^()]*(?:\([^()]*\)[^()]*)*)\))?\s*:\s*(.*)$)");
  return re;
}

const std::regex& exception_re() {
  static const std::regex re(R"(^([A-Za-z_][A-Za-z0-9_.]*)\s*:\s*(.*)$)");
  return re;
}

// "type: description" when the part before ':' has no spaces outside
// brackets.
void split_typed(const std::string& s, ReturnDoc& out) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '[' || c == '(' || c == '{' || c == '<') ++depth;
    else if (c == ']' || c == ')' || c == '}' || c == '>') --depth;
    else if (depth == 0 && c == ' ') break;
    else if (depth == 0 && c == ':' && i > 0 &&
             (i + 1 == s.size() || s[i + 1] == ' ')) {
      out.type_hint = s.substr(0, i);
      out.description = std::string(trim(std::string_view(s).substr(i + 1)));
      return;
    }
  }
  out.description = s;
}

void google_section(DocstringMetadata& md, const std::string& name,
                    Section kind, const std::vector<std::string>& body,
                    const std::string& raw) {
  bool ok = true;
  if (kind == Section::kParams) {
    std::vector<ParamDoc> found;
    ok = walk_entries(
        body, google_param_re(),
        [&](const std::smatch& m) {
          ParamDoc p;
          p.name = m[1];
          if (m[2].matched) p.type_hint = std::string(trim(m[2].str()));
          p.description = m[3];
          found.push_back(std::move(p));
        },
        [&](const std::string& more) {
          append(found.back().description, more, " ");
        });
    if (ok) md.params.insert(md.params.end(), found.begin(), found.end());
  } else if (kind == Section::kReturns) {
    std::string joined;
    for (const auto& l : body) append(joined, trim(l), " ");
    if (joined.empty()) {
      ok = false;
    } else {
      ReturnDoc r;
      split_typed(joined, r);
      md.returns = std::move(r);
    }
  } else if (kind == Section::kRaises) {
    std::vector<RaiseDoc> found;
    ok = walk_entries(
        body, exception_re(),
        [&](const std::smatch& m) { found.push_back({m[1], m[2]}); },
        [&](const std::string& more) {
          append(found.back().description, more, " ");
        });
    if (ok) md.raises.insert(md.raises.end(), found.begin(), found.end());
  } else {
    add_other(md, text::lower(name), text::cleandoc(text::join_lines(body)));
  }
  if (!ok) add_other(md, "unparsed", raw);
}

void parse_google(const std::vector<std::string>& lines, DocstringMetadata& md) {
  std::string desc;
  std::size_t i = 0;
  while (i < lines.size()) {
    std::string name;
    if (!google_header(lines[i], &name)) {
      append(desc, lines[i], "\n");
      if (desc.empty() && lines[i].empty()) desc.clear();
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < lines.size() && (blank(lines[j]) || indent_of(lines[j]) > 0)) ++j;
    std::size_t end = j;
    while (end > i + 1 && blank(lines[end - 1])) --end;
    std::vector<std::string> body(lines.begin() + static_cast<long>(i) + 1,
                                  lines.begin() + static_cast<long>(end));
    google_section(md, name, *lookup(kGoogleSections, name), body,
                   text::join_lines(lines, i, end));
    i = j;
  }
  md.description = text::cleandoc(desc);
}

// ---- NumPy ----------------------------------------------------------------

bool numpy_header(const std::vector<std::string>& lines, std::size_t i,
                  std::string* name) {
  if (i + 1 >= lines.size() || indent_of(lines[i]) != 0) return false;
  const auto n = trim(lines[i]);
  if (!lookup(kNumpySections, n)) return false;
  const auto u = trim(lines[i + 1]);
  if (u.size() != n.size() || indent_of(lines[i + 1]) != 0) return false;
  for (char c : u)
    if (c != '-') return false;
  if (name) *name = std::string(n);
  return true;
}

void parse_numpy(const std::vector<std::string>& lines, DocstringMetadata& md) {
  static const std::regex param_re(
      R"(^(\*{0,2}[A-Za-z_]\w*(?:\s*,\s*\*{0,2}[A-Za-z_]\w*)*)\s*(?::\s*(.*))?$)");
  static const std::regex any_re(R"(^(.+)$)");
  std::string desc;
  std::size_t i = 0;
  while (i < lines.size()) {
    std::string name;
    if (!numpy_header(lines, i, &name)) {
      append(desc, lines[i], "\n");
      ++i;
      continue;
    }
    std::size_t j = i + 2;
    while (j < lines.size() && !numpy_header(lines, j, nullptr)) ++j;
    std::size_t end = j;
    while (end > i + 2 && blank(lines[end - 1])) --end;
    std::vector<std::string> body(lines.begin() + static_cast<long>(i) + 2,
                                  lines.begin() + static_cast<long>(end));
    const auto kind = *lookup(kNumpySections, name);
    const auto raw = text::join_lines(lines, i, end);
    bool ok = true;
    if (kind == Section::kParams) {
      std::vector<ParamDoc> found;
      ok = walk_entries(
          body, param_re,
          [&](const std::smatch& m) {
            std::optional<std::string> type;
            if (m[2].matched && !trim(m[2].str()).empty())
              type = std::string(trim(m[2].str()));
            const std::string names = m[1];
            std::size_t start = 0;
            while (start <= names.size()) {
              auto comma = names.find(',', start);
              if (comma == std::string::npos) comma = names.size();
              ParamDoc p;
              p.name = std::string(trim(std::string_view(names).substr(start, comma - start)));
              p.type_hint = type;
              found.push_back(std::move(p));
              start = comma + 1;
            }
          },
          [&](const std::string& more) {
            append(found.back().description, more, " ");
          });
      if (ok) {
        // Comma-grouped names share the description of the group's last entry.
        for (std::size_t k = found.size(); k-- > 1;)
          if (found[k - 1].description.empty() &&
              found[k - 1].type_hint == found[k].type_hint)
            found[k - 1].description = found[k].description;
        md.params.insert(md.params.end(), found.begin(), found.end());
      }
    } else if (kind == Section::kReturns) {
      std::optional<ReturnDoc> r;
      ok = walk_entries(
          body, any_re,
          [&](const std::smatch& m) {
            if (r) return;
            ReturnDoc rd;
            const std::string entry = m[1];
            const auto colon = entry.find(" : ");
            rd.type_hint = colon == std::string::npos
                               ? entry
                               : std::string(trim(entry.substr(colon + 3)));
            r = std::move(rd);
          },
          [&](const std::string& more) { append(r->description, more, " "); });
      if (ok && r) md.returns = std::move(r);
    } else if (kind == Section::kRaises) {
      static const std::regex exc_re(R"(^([A-Za-z_][A-Za-z0-9_.]*)$)");
      std::vector<RaiseDoc> found;
      ok = walk_entries(
          body, exc_re,
          [&](const std::smatch& m) { found.push_back({m[1], ""}); },
          [&](const std::string& more) {
            append(found.back().description, more, " ");
          });
      if (ok) md.raises.insert(md.raises.end(), found.begin(), found.end());
    } else {
      add_other(md, text::lower(name), text::cleandoc(text::join_lines(body)));
    }
    if (!ok) add_other(md, "unparsed", raw);
    i = j;
  }
  md.description = text::cleandoc(desc);
}

// ---- field lists: reST (":param x:") and Epytext ("@param x:") ------------

bool param_field(std::string_view f) {
  return f == "param" || f == "parameter" || f == "arg" || f == "argument" ||
         f == "key" || f == "keyword" || f == "kwarg" || f == "kwparam";
}

const std::regex& field_re(char lead) {
  static const std::regex rest(R"(^:([A-Za-z]+)((?:\s+[^:]+)?):(?:\s+(.*))?$)");
  static const std::regex epy(R"(^@([A-Za-z]+)((?:\s+[^:]+)?):(?:\s+(.*))?$)");
  return lead == ':' ? rest : epy;
}

bool known_field(std::string_view f, char lead) {
  static const std::vector<std::string_view> rest = {
      "param", "parameter", "arg", "argument", "key", "keyword", "type",
      "returns", "return", "rtype", "raises", "raise", "except", "exception",
      "var", "ivar", "cvar", "vartype", "meta", "yields", "yield", "ytype"};
  static const std::vector<std::string_view> epy = {
      "param", "type", "return", "rtype", "raise", "keyword", "kwarg",
      "kwparam", "ivar", "cvar", "var", "see", "note", "since", "author",
      "deprecated", "version", "todo", "warning", "attention", "bug",
      "requires", "precondition", "postcondition", "invariant", "change",
      "permission", "organization", "copyright", "license", "contact",
      "summary", "group", "sort", "undocumented"};
  const auto& set = lead == ':' ? rest : epy;
  return std::find(set.begin(), set.end(), f) != set.end();
}

bool match_fields(const std::vector<std::string>& lines, char lead) {
  bool any = false;
  for (const auto& l : lines) {
    if (indent_of(l) != 0 || l.empty() || l[0] != lead) continue;
    std::smatch m;
    if (!std::regex_match(l, m, field_re(lead))) continue;
    if (!known_field(m[1].str(), lead)) return false;
    any = true;
  }
  return any;
}

void parse_fields(const std::vector<std::string>& lines, DocstringMetadata& md,
                  char lead) {
  std::string desc;
  std::map<std::string, std::string> pending_types;
  std::size_t i = 0;
  while (i < lines.size()) {
    const auto& l = lines[i];
    std::smatch m;
    const bool at_field = indent_of(l) == 0 && !l.empty() && l[0] == lead;
    if (!at_field) {
      append(desc, l, "\n");
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < lines.size() && !blank(lines[j]) && indent_of(lines[j]) > 0) ++j;
    if (!std::regex_match(l, m, field_re(lead))) {
      add_other(md, "unparsed", text::join_lines(lines, i, j));
      i = j;
      continue;
    }
    const std::string field = m[1];
    const std::string args(trim(m[2].str()));
    std::string body = m[3].matched ? m[3].str() : std::string();
    for (std::size_t k = i + 1; k < j; ++k) append(body, trim(lines[k]), " ");
    body = std::string(trim(body));
    const auto raw = text::join_lines(lines, i, j);
    i = j;
    if (param_field(field)) {
      if (args.empty()) {
        add_other(md, "unparsed", raw);
        continue;
      }
      ParamDoc p;
      const auto sp = args.find_last_of(" \t");
      if (sp == std::string::npos) {
        p.name = args;
      } else {
        p.name = args.substr(sp + 1);
        p.type_hint = std::string(trim(args.substr(0, sp)));
      }
      p.description = body;
      md.params.push_back(std::move(p));
    } else if (field == "type") {
      if (args.empty()) {
        add_other(md, "unparsed", raw);
        continue;
      }
      pending_types[args] = body;
    } else if (field == "returns" || field == "return" || field == "yields" ||
               field == "yield") {
      if (!md.returns) md.returns = ReturnDoc{};
      md.returns->description = body;
    } else if (field == "rtype" || field == "ytype") {
      if (!md.returns) md.returns = ReturnDoc{};
      md.returns->type_hint = body;
    } else if (field == "raises" || field == "raise" || field == "except" ||
               field == "exception") {
      if (args.empty()) {
        add_other(md, "unparsed", raw);
        continue;
      }
      md.raises.push_back({args, body});
    } else {
      add_other(md, field, args.empty() ? body : args + ": " + body);
    }
  }
  for (auto& [name, type] : pending_types) {
    auto it = std::find_if(md.params.begin(), md.params.end(),
                           [&](const ParamDoc& p) { return p.name == name; });
    if (it != md.params.end()) it->type_hint = type;
    else md.params.push_back({name, type, ""});
  }
  md.description = text::cleandoc(desc);
}

// ---- block tags: Javadoc, JSDoc, PHPDoc, Doxygen, YARD --------------------

struct Tag {
  std::string name;
  std::string rest;
  std::string raw;
};

bool tag_start(std::string_view line, bool backslash, std::string* name,
               std::string* rest) {
  const auto t = trim(line);
  if (t.size() < 2) return false;
  if (t[0] != '@' && !(backslash && t[0] == '\\')) return false;
  std::size_t i = 1;
  while (i < t.size() &&
         (std::isalnum(static_cast<unsigned char>(t[i])) || t[i] == '_' ||
          t[i] == '-'))
    ++i;
  if (i == 1 || !std::isalpha(static_cast<unsigned char>(t[1]))) return false;
  if (i < t.size() && !text::is_space(t[i]) && t[i] != '[' && t[i] != '{')
    return false;
  if (name) *name = std::string(t.substr(1, i - 1));
  if (rest) *rest = std::string(trim(t.substr(i)));
  return true;
}

void split_tags(const std::vector<std::string>& lines, bool backslash,
                std::string& desc, std::vector<Tag>& tags) {
  for (const auto& l : lines) {
    std::string name, rest;
    if (tag_start(l, backslash, &name, &rest)) {
      tags.push_back({name, rest, l});
      continue;
    }
    if (tags.empty()) {
      append(desc, l, "\n");
    } else {
      append(tags.back().rest, trim(l), tags.back().rest.empty() ? "" : " ");
      tags.back().raw += "\n" + l;
    }
  }
  desc = text::cleandoc(desc);
}

bool in(std::string_view s, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

bool javadoc_tag(std::string_view t) {
  return in(t, {"param", "return", "returns", "throws", "exception", "see",
                "since", "author", "version", "deprecated", "serial",
                "serialField", "serialData", "apiNote", "implSpec",
                "implNote", "hidden", "inheritDoc", "spec", "uses",
                "provides", "jls", "jvms", "todo"});
}

bool jsdoc_tag(std::string_view t) {
  return in(t, {"param", "arg", "argument", "returns", "return", "throws",
                "exception", "type", "typedef", "example", "see", "since",
                "deprecated", "async", "private", "public", "protected",
                "static", "memberof", "memberOf", "callback", "property",
                "prop", "constructor", "class", "fires", "event", "module",
                "namespace", "todo", "author", "version", "override",
                "readonly", "abstract", "function", "func", "method",
                "name", "description", "desc", "summary", "default",
                "defaultvalue", "enum", "exports", "external", "file",
                "fileoverview", "overview", "generator", "global", "ignore",
                "implements", "inheritdoc", "inner", "instance", "interface",
                "kind", "lends", "license", "listens", "mixes", "mixin",
                "package", "requires", "this", "tutorial", "variation",
                "yields", "yield", "template", "access", "alias", "augments",
                "extends", "borrows", "classdesc", "const", "constant",
                "copyright", "emits", "hideconstructor", "link", "virtual",
                "see", "api", "internal", "nocollapse", "suppress", "export"});
}

bool phpdoc_tag(std::string_view t) {
  if (t.rfind("psalm-", 0) == 0 || t.rfind("phpstan-", 0) == 0) return true;
  return in(t, {"param", "return", "returns", "throws", "throw", "var", "see",
                "since", "author", "version", "deprecated", "link", "package",
                "subpackage", "license", "copyright", "todo", "example",
                "internal", "method", "property", "property-read",
                "property-write", "uses", "used-by", "global", "api",
                "inheritdoc", "inheritDoc", "final", "static", "access",
                "category", "filesource", "ignore", "source", "override",
                "abstract", "template", "mixin", "codeCoverageIgnore",
                "dataProvider", "test", "group", "covers", "depends",
                "expectedException", "Annotation", "Target", "ORM"});
}

bool yard_tag(std::string_view t) {
  return in(t, {"param", "return", "raise", "option", "yield", "yieldparam",
                "yieldreturn", "example", "see", "note", "api", "overload",
                "deprecated", "author", "since", "todo", "attr",
                "attr_reader", "attr_writer", "abstract", "private",
                "version", "visibility", "!visibility", "scope", "macro",
                "method", "!method", "!macro", "!attribute", "!parse"});
}

bool doxygen_key_tag(std::string_view t) {
  return in(t, {"brief", "short", "details", "param", "tparam", "return",
                "returns", "result", "retval", "throw", "throws", "exception",
                "note", "see", "sa", "pre", "post", "warning"});
}

// Leading "{type}" of JSDoc/closure tags.
std::optional<std::string> take_braced(std::string& rest) {
  if (rest.empty() || rest[0] != '{') return std::nullopt;
  int depth = 0;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (rest[i] == '{') ++depth;
    else if (rest[i] == '}' && --depth == 0) {
      std::string type = rest.substr(1, i - 1);
      rest = std::string(trim(std::string_view(rest).substr(i + 1)));
      return std::string(trim(type));
    }
  }
  return std::nullopt;
}

// Leading "[Type, Nil]" of YARD tags.
std::optional<std::string> take_bracketed(std::string& rest) {
  if (rest.empty() || rest[0] != '[') return std::nullopt;
  const auto close = rest.find(']');
  if (close == std::string::npos) return std::nullopt;
  std::string type = rest.substr(1, close - 1);
  rest = std::string(trim(std::string_view(rest).substr(close + 1)));
  return std::string(trim(type));
}

std::string take_word(std::string& rest) {
  std::size_t i = 0;
  while (i < rest.size() && !text::is_space(rest[i])) ++i;
  std::string w = rest.substr(0, i);
  rest = std::string(trim(std::string_view(rest).substr(i)));
  return w;
}

void strip_dash(std::string& rest) {
  if (rest.size() >= 2 && rest[0] == '-' && rest[1] == ' ')
    rest = std::string(trim(std::string_view(rest).substr(1)));
}

void parse_tags(const std::vector<std::string>& lines, DocstringMetadata& md,
                StyleId style) {
  std::vector<Tag> tags;
  split_tags(lines, style == StyleId::kDoxygen, md.description, tags);
  std::string brief;
  for (auto& tag : tags) {
    std::string rest = tag.rest;
    const auto& t = tag.name;
    bool ok = true;
    if (t == "param" || t == "arg" || t == "argument") {
      ParamDoc p;
      switch (style) {
        case StyleId::kJSDoc: {
          p.type_hint = take_braced(rest);
          std::string name = take_word(rest);
          if (name.size() > 2 && name.front() == '[') {
            name = name.substr(1, name.find_first_of("=]") - 1);
          }
          p.name = name;
          strip_dash(rest);
          break;
        }
        case StyleId::kPHPDoc: {
          std::string type;
          while (!rest.empty()) {
            std::string w = take_word(rest);
            if (w.find('$') != std::string::npos) {
              p.name = w;
              break;
            }
            append(type, w, " ");
          }
          if (!type.empty()) p.type_hint = type;
          break;
        }
        case StyleId::kYard: {
          p.type_hint = take_bracketed(rest);
          p.name = take_word(rest);
          if (!p.type_hint) p.type_hint = take_bracketed(rest);
          break;
        }
        case StyleId::kDoxygen: {
          if (!rest.empty() && rest[0] == '[') take_bracketed(rest);
          p.name = take_word(rest);
          break;
        }
        default:
          p.name = take_word(rest);
          break;
      }
      p.description = rest;
      ok = !p.name.empty() && p.name != "-";
      if (ok) md.params.push_back(std::move(p));
    } else if (t == "return" || t == "returns" || t == "result") {
      ReturnDoc r;
      if (style == StyleId::kJSDoc) r.type_hint = take_braced(rest);
      if (style == StyleId::kYard) r.type_hint = take_bracketed(rest);
      if (style == StyleId::kPHPDoc) {
        const auto w = take_word(rest);
        if (!w.empty()) r.type_hint = w;
      }
      r.description = rest;
      ok = r.type_hint || !r.description.empty();
      if (ok) md.returns = std::move(r);
    } else if (t == "throws" || t == "throw" || t == "exception" ||
               t == "raise") {
      RaiseDoc x;
      std::optional<std::string> type;
      if (style == StyleId::kJSDoc) type = take_braced(rest);
      if (style == StyleId::kYard) type = take_bracketed(rest);
      x.exception = type ? *type : take_word(rest);
      strip_dash(rest);
      x.description = rest;
      ok = !x.exception.empty();
      if (ok) md.raises.push_back(std::move(x));
    } else if (style == StyleId::kDoxygen && (t == "brief" || t == "short")) {
      append(brief, rest, " ");
    } else if (style == StyleId::kDoxygen && t == "details") {
      append(md.description, rest, "\n");
    } else {
      add_other(md, t, rest);
    }
    if (!ok) add_other(md, "unparsed", tag.raw);
  }
  if (!brief.empty()) {
    std::string full = brief;
    append(full, md.description, "\n");
    md.description = full;
  }
}

bool match_tags(const std::vector<std::string>& lines, StyleId style) {
  bool any = false;
  bool key = false;
  for (const auto& l : lines) {
    std::string name;
    if (!tag_start(l, style == StyleId::kDoxygen, &name, nullptr)) continue;
    any = true;
    switch (style) {
      case StyleId::kJavadoc:
        if (!javadoc_tag(name)) return false;
        break;
      case StyleId::kJSDoc:
        if (!jsdoc_tag(name)) return false;
        break;
      case StyleId::kPHPDoc:
        if (!phpdoc_tag(name)) return false;
        break;
      case StyleId::kYard:
        if (!yard_tag(name)) return false;
        break;
      case StyleId::kDoxygen:
        if (doxygen_key_tag(name)) key = true;
        break;
      default:
        return false;
    }
  }
  return style == StyleId::kDoxygen ? key : any;
}

// ---- XML documentation comments --------------------------------------------

constexpr std::array<std::string_view, 10> kXmlTags = {
    "summary", "param", "returns", "exception", "remarks",
    "example", "value", "typeparam", "para", "code"};

std::size_t count(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string_view::npos;
       p = s.find(needle, p + needle.size()))
    ++n;
  return n;
}

bool match_xml(std::string_view doc) {
  bool key = false;
  for (auto tag : kXmlTags) {
    const std::string open = "<" + std::string(tag);
    const std::string close = "</" + std::string(tag) + ">";
    std::size_t opens = 0;
    for (auto p = doc.find(open); p != std::string_view::npos;
         p = doc.find(open, p + 1)) {
      const auto after = p + open.size();
      if (after < doc.size() && (doc[after] == '>' || doc[after] == ' ')) {
        const auto gt = doc.find('>', after);
        if (gt != std::string_view::npos && doc[gt - 1] != '/') ++opens;
      }
    }
    if (opens != count(doc, close)) return false;
    if (opens > 0 && (tag == "summary" || tag == "param" || tag == "returns" ||
                      tag == "remarks"))
      key = true;
  }
  return key;
}

std::string xml_inner(std::string s) {
  static const std::regex ref(
      R"re(<(?:see|seealso|paramref|typeparamref)\s+(?:cref|name|langword|href)\s*=\s*"([^"]*)"\s*/>)re");
  static const std::regex tags(R"(</?(?:c|para|b|i|em|strong|code|list|item|description|term)\s*/?>)");
  s = std::regex_replace(s, ref, "$1");
  s = std::regex_replace(s, tags, " ");
  return text::squash(s);
}

void parse_xml(std::string_view doc, DocstringMetadata& md) {
  const std::string s(doc);
  static const std::regex element(
      R"re(<(summary|param|returns|exception|remarks|example|value|typeparam)((?:\s+\w+\s*=\s*"[^"]*")*)\s*>([\s\S]*?)</\1>)re");
  static const std::regex attr(R"re((\w+)\s*=\s*"([^"]*)")re");
  std::string outside;
  std::size_t last = 0;
  for (std::sregex_iterator it(s.begin(), s.end(), element), end; it != end;
       ++it) {
    const auto& m = *it;
    outside += s.substr(last, static_cast<std::size_t>(m.position(0)) - last);
    last = static_cast<std::size_t>(m.position(0) + m.length(0));
    const std::string tag = m[1];
    const std::string attrs = m[2];
    const std::string body = xml_inner(m[3]);
    std::map<std::string, std::string> a;
    for (std::sregex_iterator ai(attrs.begin(), attrs.end(), attr), ae; ai != ae;
         ++ai)
      a[(*ai)[1]] = (*ai)[2];
    if (tag == "summary") {
      append(md.description, body, "\n");
    } else if (tag == "param") {
      if (a.count("name")) md.params.push_back({a["name"], std::nullopt, body});
      else add_other(md, "unparsed", m[0].str());
    } else if (tag == "returns") {
      md.returns = ReturnDoc{std::nullopt, body};
    } else if (tag == "exception") {
      if (a.count("cref")) md.raises.push_back({a["cref"], body});
      else add_other(md, "unparsed", m[0].str());
    } else {
      add_other(md, tag, a.count("name") ? a["name"] + ": " + body : body);
    }
  }
  outside += s.substr(last);
  const auto rest = trim(outside);
  if (md.description.empty()) md.description = xml_inner(std::string(rest));
}

// ---- RDoc -----------------------------------------------------------------

const std::regex& rdoc_item_re() {
  static const std::regex re(
      R"(^\s*(?:[*-]\s+\+?([A-Za-z_]\w*)\+?\s*(?:-|::)\s*(.*)|\[\+?([A-Za-z_]\w*)\+?\]\s+(.*)|\+?([A-Za-z_]\w*)\+?::\s+(.*))$)");
  return re;
}

bool match_rdoc(const std::vector<std::string>& lines) {
  static const std::regex heading(R"(^=+\s+\S.*$)");
  static const std::regex directive(
      R"(^:(call-seq|nodoc|yields|arg|args|section|category|doc|notnew|include):.*$)");
  for (const auto& l : lines) {
    if (std::regex_match(l, heading) || std::regex_match(l, directive) ||
        std::regex_match(l, rdoc_item_re()))
      return true;
  }
  return false;
}

void parse_rdoc(const std::vector<std::string>& lines, DocstringMetadata& md) {
  static const std::regex directive(R"(^:([a-z-]+):\s*(.*)$)");
  std::string desc;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& l = lines[i];
    std::smatch m;
    if (std::regex_match(l, m, rdoc_item_re())) {
      const int g = m[1].matched ? 1 : m[3].matched ? 3 : 5;
      md.params.push_back({m[g].str(), std::nullopt, std::string(trim(m[g + 1].str()))});
      continue;
    }
    if (indent_of(l) == 0 && std::regex_match(l, m, directive)) {
      std::string body = m[2];
      std::size_t j = i + 1;
      while (j < lines.size() && !blank(lines[j]) && indent_of(lines[j]) > 0)
        append(body, trim(lines[j++]), "\n");
      add_other(md, m[1], body);
      i = j - 1;
      continue;
    }
    append(desc, l, "\n");
  }
  md.description = text::cleandoc(desc);
}

}  // namespace

std::string_view style_name(StyleId style) {
  switch (style) {
    case StyleId::kGoogle: return "google";
    case StyleId::kNumPy: return "numpy";
    case StyleId::kReST: return "rest";
    case StyleId::kEpytext: return "epytext";
    case StyleId::kJavadoc: return "javadoc";
    case StyleId::kJSDoc: return "jsdoc";
    case StyleId::kPHPDoc: return "phpdoc";
    case StyleId::kDoxygen: return "doxygen";
    case StyleId::kXmlDoc: return "xmldoc";
    case StyleId::kYard: return "yard";
    case StyleId::kRdoc: return "rdoc";
    case StyleId::kUnstyled: return "unstyled";
  }
  return "unstyled";
}

std::optional<StyleId> parse_style(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(StyleId::kUnstyled); ++i) {
    const auto s = static_cast<StyleId>(i);
    if (style_name(s) == text::lower(name)) return s;
  }
  return std::nullopt;
}

std::vector<StyleId> style_priority(LanguageId language) {
  switch (language) {
    case LanguageId::kPython:
      return {StyleId::kGoogle, StyleId::kNumPy, StyleId::kReST, StyleId::kEpytext};
    case LanguageId::kJava: return {StyleId::kJavadoc};
    case LanguageId::kJavaScript: return {StyleId::kJSDoc};
    case LanguageId::kPhp: return {StyleId::kPHPDoc};
    case LanguageId::kC:
    case LanguageId::kCpp: return {StyleId::kDoxygen};
    case LanguageId::kCSharp: return {StyleId::kXmlDoc, StyleId::kDoxygen};
    case LanguageId::kRuby: return {StyleId::kYard, StyleId::kRdoc};
    case LanguageId::kGo:
    case LanguageId::kRust: return {};
  }
  return {};
}

bool matches_style(std::string_view docstring, StyleId style) {
  const auto lines = text::split_lines(text::cleandoc(docstring));
  switch (style) {
    case StyleId::kGoogle: return match_google(lines);
    case StyleId::kNumPy:
      for (std::size_t i = 0; i < lines.size(); ++i)
        if (numpy_header(lines, i, nullptr)) return true;
      return false;
    case StyleId::kReST: return match_fields(lines, ':');
    case StyleId::kEpytext: return match_fields(lines, '@');
    case StyleId::kJavadoc:
    case StyleId::kJSDoc:
    case StyleId::kPHPDoc:
    case StyleId::kDoxygen:
    case StyleId::kYard: return match_tags(lines, style);
    case StyleId::kXmlDoc: return match_xml(docstring);
    case StyleId::kRdoc: return match_rdoc(lines);
    case StyleId::kUnstyled: return true;
  }
  return false;
}

StyleId detect_style(std::string_view docstring, LanguageId language) {
  if (trim(docstring).empty()) return StyleId::kUnstyled;
  // A style whose parse leaves an unparsed section is a deviation.
  for (auto style : style_priority(language))
    if (matches_style(docstring, style) &&
        !parse_metadata(docstring, style).other_tags.contains("unparsed"))
      return style;
  return StyleId::kUnstyled;
}

DocstringMetadata parse_metadata(std::string_view docstring, StyleId style) {
  DocstringMetadata md;
  md.style = style;
  const auto clean = text::cleandoc(docstring);
  const auto lines = text::split_lines(clean);
  switch (style) {
    case StyleId::kGoogle: parse_google(lines, md); break;
    case StyleId::kNumPy: parse_numpy(lines, md); break;
    case StyleId::kReST: parse_fields(lines, md, ':'); break;
    case StyleId::kEpytext: parse_fields(lines, md, '@'); break;
    case StyleId::kJavadoc:
    case StyleId::kJSDoc:
    case StyleId::kPHPDoc:
    case StyleId::kDoxygen:
    case StyleId::kYard: parse_tags(lines, md, style); break;
    case StyleId::kXmlDoc: parse_xml(clean, md); break;
    case StyleId::kRdoc: parse_rdoc(lines, md); break;
    case StyleId::kUnstyled: md.description = clean; break;
  }
  md.short_docstring = short_docstring(md.description);
  return md;
}

namespace {
// Abbreviations whose final '.' never ends a sentence.
bool ends_abbreviation(std::string_view s, std::size_t dot) {
  static constexpr std::string_view kAbbrev[] = {"e.g.", "i.e.", "etc.", "vs.", "cf."};
  for (auto a : kAbbrev) {
    if (dot + 1 < a.size()) continue;
    const std::size_t start = dot + 1 - a.size();
    if (s.substr(start, a.size()) != a) continue;
    if (start == 0 || !std::isalnum(static_cast<unsigned char>(s[start - 1]))) return true;
  }
  return false;
}
}  // namespace

std::string short_docstring(std::string_view description) {
  const auto s = trim(description);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c != '.' && c != '!' && c != '?') continue;
    const std::size_t j = i + 1;
    if (c == '.' && j < s.size() && ends_abbreviation(s, i)) continue;
    if (j == s.size()) return std::string(s.substr(0, j));
    if (!text::is_space(s[j])) continue;
    std::size_t k = j;
    int newlines = 0;
    while (k < s.size() && text::is_space(s[k])) {
      if (s[k] == '\n') ++newlines;
      ++k;
    }
    if (newlines >= 2 || k == s.size() ||
        std::isupper(static_cast<unsigned char>(s[k])))
      return std::string(s.substr(0, j));
  }
  const auto nl = s.find('\n');
  if (nl == std::string_view::npos) return std::string(s);
  return std::string(text::rtrim(s.substr(0, nl)));
}

}  // namespace forge
