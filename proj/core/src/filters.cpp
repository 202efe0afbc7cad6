#include "forge/filters.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "forge/error.hpp"
#include "forge/langid.hpp"
#include "forge/tokenize.hpp"
#include "text_util.hpp"

namespace forge {
namespace {

using text::blank;
using text::indent_of;
using text::trim;
using Lines = std::vector<std::string>;

bool alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }

bool contains_ci(std::string_view hay, std::string_view needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i)
    if (text::starts_with_ci(hay.substr(i), needle)) return true;
  return false;
}

// End of the body that follows a header line: the non-blank run starting at
// `from`, then any blank-separated blocks indented deeper than `base`.
std::size_t block_end(const Lines& lines, std::size_t from, std::size_t base) {
  std::size_t j = from;
  while (j < lines.size() && !blank(lines[j])) ++j;
  while (true) {
    std::size_t k = j;
    while (k < lines.size() && blank(lines[k])) ++k;
    if (k == j || k == lines.size() || indent_of(lines[k]) <= base) return j;
    j = k;
    while (j < lines.size() && (blank(lines[j]) || indent_of(lines[j]) > base)) {
      if (blank(lines[j])) {
        std::size_t n = j;
        while (n < lines.size() && blank(lines[n])) ++n;
        if (n == lines.size() || indent_of(lines[n]) <= base) break;
      }
      ++j;
    }
  }
}

// ---- delimiters -------------------------------------------------------------

bool strip_quotes(std::string& s) {
  std::size_t p = 0;
  while (p < s.size() && p < 2 && std::string_view("rRuUbBfF").find(s[p]) != std::string_view::npos)
    ++p;
  const std::string_view body = std::string_view(s).substr(p);
  for (std::string_view q : {"\"\"\"", "'''"}) {
    if (body.size() >= 6 && body.substr(0, 3) == q && body.substr(body.size() - 3) == q) {
      s = std::string(body.substr(3, body.size() - 6));
      return true;
    }
  }
  for (char q : {'"', '\''}) {
    if (body.size() >= 2 && body.front() == q && body.back() == q &&
        body.find('\n') == std::string_view::npos) {
      s = std::string(body.substr(1, body.size() - 2));
      return true;
    }
  }
  return false;
}

// A marker the whole block shares, stripped per line with one following space.
// A '*' gutter must be followed by a space so "*args" is not a marker.
std::string_view common_marker(const Lines& lines) {
  static constexpr std::string_view kMarkers[] = {"///", "//!", "//", "#", "*"};
  for (auto m : kMarkers) {
    bool all = true;
    bool any = false;
    for (const auto& l : lines) {
      if (blank(l)) continue;
      const auto t = trim(l);
      if (t.substr(0, m.size()) != m) {
        all = false;
        break;
      }
      if (m == "*" && t.size() > 1 && t[1] != ' ' && t[1] != '*' && t[1] != '\t') {
        all = false;
        break;
      }
      any = true;
    }
    if (all && any) return m;
  }
  return {};
}

std::string delimiters_pass(std::string_view in) {
  std::string s(in);
  if (strip_quotes(s)) return s;
  if (s.rfind("/*", 0) == 0) {
    std::size_t b = 2;
    while (b < s.size() && (s[b] == '*' || s[b] == '!')) ++b;
    s.erase(0, b);
  }
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "*/") == 0) {
    std::size_t e = s.size() - 2;
    while (e > 0 && s[e - 1] == '*') --e;
    s.erase(e);
  }
  Lines lines = text::split_lines(s);
  // Ruby =begin/=end
  if (!lines.empty() && trim(lines.front()).rfind("=begin", 0) == 0) {
    lines.erase(lines.begin());
    if (!lines.empty() && trim(lines.back()) == "=end") lines.pop_back();
  }
  const auto marker = common_marker(lines);
  if (!marker.empty()) {
    for (auto& l : lines) {
      const auto ind = indent_of(l);
      if (l.compare(ind, marker.size(), marker) != 0) continue;
      std::size_t cut = ind + marker.size();
      if (marker == "#" || marker == "*")
        while (cut < l.size() && l[cut] == marker[0]) ++cut;
      if (cut < l.size() && l[cut] == ' ') ++cut;
      l.erase(0, cut);
    }
  }
  return text::join_lines(lines);
}

// ---- hyperlinks ---------------------------------------------------------------

std::size_t url_end(std::string_view s, std::size_t i) {
  std::size_t j = i;
  while (j < s.size() && !text::is_space(s[j]) && s[j] != '<' && s[j] != '>' &&
         s[j] != '"' && s[j] != '\'' && s[j] != ')' && s[j] != ']' && s[j] != '}' &&
         s[j] != '`')
    ++j;
  while (j > i && (s[j - 1] == '.' || s[j - 1] == ',' || s[j - 1] == ';' || s[j - 1] == ':'))
    --j;
  return j;
}

std::size_t url_start(std::string_view s, std::size_t i) {
  for (std::string_view scheme : {"https://", "http://", "ftp://", "www."}) {
    if (text::starts_with_ci(s.substr(i), scheme) && (i == 0 || !alnum(s[i - 1])) &&
        i + scheme.size() < s.size() && !text::is_space(s[i + scheme.size()]))
      return scheme.size();
  }
  return 0;
}

bool link_residue(std::string_view line) {
  const auto t = text::lower(trim(line));
  static const std::vector<std::string_view> kResidue = {
      "@see", "@link", "see", "see:", "see also", "see also:", "link", "link:",
      "links:", "url", "url:", "ref:", "reference:", "references:", "more info:",
      "more information:", "source:", "from:", "via", "docs:", "documentation:",
      "{@link}", "{@see}", "<>", "()", "[]", "-", "*"};
  if (std::find(kResidue.begin(), kResidue.end(), t) != kResidue.end()) return true;
  return false;
}

std::string hyperlink_pass(std::string_view in) {
  Lines lines = text::split_lines(in);
  Lines out;
  for (const auto& l : lines) {
    std::string r;
    bool hit = false;
    std::size_t i = 0;
    while (i < l.size()) {
      const auto n = url_start(l, i);
      if (n == 0) {
        r += l[i++];
        continue;
      }
      hit = true;
      std::size_t e = url_end(l, i + n);
      // Wrappers around the URL: <...>, {@link ...}, markdown (...), reST `<...>`_
      if (!r.empty() && r.back() == '<' && e < l.size() && l[e] == '>') {
        r.pop_back();
        ++e;
        if (e + 2 <= l.size() && l.compare(e, 2, "`_") == 0) e += 2;
        while (!r.empty() && r.back() == ' ') r.pop_back();
        if (!r.empty() && r.back() == '`') r.pop_back();
      } else if (!r.empty() && r.back() == '(' && e < l.size() && l[e] == ')' &&
                 r.size() >= 2 && r[r.size() - 2] == ']') {
        r.pop_back();
        r.pop_back();
        ++e;
        const auto open = r.rfind('[');
        if (open != std::string::npos) r.erase(open, 1);
      } else if (r.size() >= 7 && r.compare(r.size() - 7, 7, "{@link ") == 0 &&
                 e < l.size() && l[e] == '}') {
        r.erase(r.size() - 7);
        ++e;
      }
      i = e;
    }
    if (hit && (blank(r) || link_residue(r))) continue;
    out.push_back(hit ? std::string(text::rtrim(r)) : l);
  }
  return text::join_lines(out);
}

// ---- embedded code ----------------------------------------------------------

bool directive_header(std::string_view line) {
  auto t = trim(line);
  if (t.rfind("..", 0) == 0) t = trim(t.substr(2));
  for (std::string_view d : {"code-block::", "code::", "sourcecode::", "highlight::"})
    if (t.rfind(d, 0) == 0) return true;
  // reST literal block: "Run it like this::"
  return t.size() > 2 && t.substr(t.size() - 2) == "::";
}

std::string embedded_code_pass(std::string_view in) {
  Lines lines = text::split_lines(in);
  Lines out;
  std::size_t i = 0;
  while (i < lines.size()) {
    const auto& l = lines[i];
    const auto t = trim(l);
    if (t.rfind("```", 0) == 0 || t.rfind("~~~", 0) == 0) {
      const auto fence = t.substr(0, 3);
      std::size_t j = i + 1;
      while (j < lines.size() && trim(lines[j]).rfind(fence, 0) != 0) ++j;
      i = std::min(j + 1, lines.size());
      continue;
    }
    if (directive_header(l)) {
      out.push_back(l);
      i = block_end(lines, i + 1, indent_of(l));
      continue;
    }
    if (t == ">>>" || t.rfind(">>> ", 0) == 0) {
      std::size_t j = i + 1;
      while (j < lines.size() && !blank(lines[j])) ++j;
      i = j;
      continue;
    }
    if (t.rfind("$ ", 0) == 0 && t.size() > 2) {
      ++i;
      continue;
    }
    out.push_back(l);
    ++i;
  }
  return text::join_lines(out);
}

// ---- math ------------------------------------------------------------------

bool math_line(std::string_view line) {
  static constexpr std::string_view kCommands[] = {
      "sqrt", "exp", "mathbf", "frac", "sum", "prod", "int", "alpha", "beta",
      "gamma", "delta", "sigma", "theta", "lambda", "cdot", "times", "leq",
      "geq", "neq", "infty", "left", "right", "mathrm", "mathcal", "partial",
      "hat", "vec", "begin{equation", "begin{align", "log", "ln", "pi", "mu"};
  for (std::size_t p = line.find('\\'); p != std::string_view::npos;
       p = line.find('\\', p + 1)) {
    const auto rest = line.substr(p + 1);
    for (auto c : kCommands) {
      if (rest.rfind(c, 0) != 0) continue;
      const auto after = p + 1 + c.size();
      if (after >= line.size() || !alpha(line[after])) return true;
    }
  }
  if (line.find("$$") != std::string_view::npos) return true;
  if (line.find(":math:`") != std::string_view::npos) return true;
  const auto t = trim(line);
  if (t.rfind(".. math::", 0) == 0) return true;
  // Bracketed equation: "[B,A] = F(...)"
  if (!t.empty() && t[0] == '[') {
    const auto close = t.find(']');
    if (close != std::string_view::npos && close > 1) {
      const auto rest = trim(t.substr(close + 1));
      if (!rest.empty() && rest[0] == '=' && (rest.size() == 1 || rest[1] != '=')) return true;
    }
  }
  return false;
}

std::string math_pass(std::string_view in) {
  Lines lines = text::split_lines(in);
  Lines out;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (!math_line(lines[i])) {
      out.push_back(lines[i++]);
      continue;
    }
    const auto base = indent_of(lines[i]);
    ++i;
    // The rest of the sentence: continuation lines that do not start a new one.
    while (i < lines.size() && !blank(lines[i])) {
      const auto t = trim(lines[i]);
      if (upper(t[0]) && indent_of(lines[i]) <= base) break;
      ++i;
    }
  }
  return text::join_lines(out);
}

// ---- metadata tags ----------------------------------------------------------

bool summary_tag(std::string_view name) {
  return name == "brief" || name == "short" || name == "summary" ||
         name == "description" || name == "desc" || name == "details";
}

bool rest_field(std::string_view t) {
  static constexpr std::string_view kFields[] = {
      "param", "parameter", "arg", "argument", "key", "keyword", "type",
      "returns", "return", "rtype", "raises", "raise", "except", "exception",
      "var", "ivar", "cvar", "vartype", "yields", "yield", "ytype", "meta"};
  if (t.size() < 3 || t[0] != ':') return false;
  std::size_t i = 1;
  while (i < t.size() && alpha(t[i])) ++i;
  const auto name = t.substr(1, i - 1);
  if (std::find(std::begin(kFields), std::end(kFields), name) == std::end(kFields))
    return false;
  return t.find(':', i) != std::string_view::npos;
}

// "@tag" or "\tag" at line start; returns the tag name.
std::optional<std::string_view> tag_line(std::string_view line) {
  const auto t = trim(line);
  if (t.size() < 2 || (t[0] != '@' && t[0] != '\\') || !alpha(t[1])) return std::nullopt;
  std::size_t i = 1;
  while (i < t.size() && (alnum(t[i]) || t[i] == '_' || t[i] == '-')) ++i;
  if (i < t.size() && !text::is_space(t[i]) && t[i] != '[' && t[i] != '{' && t[i] != ':' &&
      t[i] != '(')
    return std::nullopt;
  if (t[0] == '\\') {
    // Doxygen commands only; a backslash line could be a Windows path.
    static constexpr std::string_view kCommands[] = {
        "param", "tparam", "return", "returns", "retval", "result", "throw",
        "throws", "exception", "brief", "short", "details", "note", "see", "sa",
        "author", "date", "version", "since", "pre", "post", "warning",
        "deprecated", "file", "class", "struct", "fn", "def", "ingroup",
        "defgroup", "addtogroup", "copyright", "todo", "bug", "invariant"};
    const auto name = t.substr(1, i - 1);
    if (std::find(std::begin(kCommands), std::end(kCommands), name) == std::end(kCommands))
      return std::nullopt;
  }
  return t.substr(1, i - 1);
}

const char* const kXmlMetaTags[] = {"param",    "returns",    "exception",
                                    "typeparam", "seealso",   "inheritdoc",
                                    "value",    "permission", "include"};

// Removes whole XML doc elements that carry metadata, not prose.
std::string strip_xml_meta(std::string s) {
  for (const char* tag : kXmlMetaTags) {
    const std::string open = std::string("<") + tag;
    const std::string close = std::string("</") + tag + ">";
    std::size_t p = 0;
    while ((p = s.find(open, p)) != std::string::npos) {
      const auto after = p + open.size();
      if (after >= s.size() || (s[after] != ' ' && s[after] != '>' && s[after] != '/')) {
        p = after;
        continue;
      }
      const auto gt = s.find('>', after);
      if (gt == std::string::npos) break;
      std::size_t end;
      if (s[gt - 1] == '/') {
        end = gt + 1;
      } else {
        const auto c = s.find(close, gt);
        if (c == std::string::npos) {
          p = gt;
          continue;
        }
        end = c + close.size();
      }
      s.erase(p, end - p);
    }
  }
  return s;
}

std::string metadata_pass(std::string_view in, const FilterConfig& config) {
  const std::string xml = strip_xml_meta(std::string(in));
  Lines lines = text::split_lines(xml);
  Lines out;
  std::size_t i = 0;
  auto protected_line = [&](std::string_view l) {
    for (const auto& p : config.autogen_patterns)
      if (contains_ci(l, p)) return true;
    return false;
  };
  while (i < lines.size()) {
    const auto& l = lines[i];
    const auto tag = tag_line(l);
    const auto t = trim(l);
    if (tag && !protected_line(l)) {
      if (summary_tag(*tag)) {
        const auto rest = trim(t.substr(1 + tag->size()));
        if (!rest.empty()) out.emplace_back(rest);
        ++i;
        continue;
      }
      ++i;
      while (i < lines.size() && !blank(lines[i]) && !tag_line(lines[i])) ++i;
      continue;
    }
    if (rest_field(t)) {
      const auto base = indent_of(l);
      ++i;
      while (i < lines.size() && !blank(lines[i]) && indent_of(lines[i]) > base) ++i;
      continue;
    }
    out.push_back(l);
    ++i;
  }
  return text::join_lines(out);
}

// ---- HTML -------------------------------------------------------------------

bool inline_html(std::string_view n) {
  static constexpr std::string_view kTags[] = {
      "a", "b", "i", "u", "s", "em", "strong", "code", "tt", "span", "font",
      "sup", "sub", "var", "kbd", "samp", "cite", "small", "big", "strike",
      "c", "abbr", "mark", "q", "del", "ins", "see", "paramref", "typeparamref"};
  return std::find(std::begin(kTags), std::end(kTags), n) != std::end(kTags);
}

bool block_html(std::string_view n) {
  static constexpr std::string_view kTags[] = {
      "p", "br", "div", "li", "ul", "ol", "pre", "h1", "h2", "h3", "h4", "h5",
      "h6", "table", "tr", "td", "th", "thead", "tbody", "blockquote", "dl",
      "dt", "dd", "hr", "para", "summary", "remarks", "example", "center",
      "img", "list", "item", "description", "term", "listheader", "html",
      "body", "head", "section", "nav", "caption"};
  return std::find(std::begin(kTags), std::end(kTags), n) != std::end(kTags);
}

// Parses a tag at s[i] == '<'. Returns its length and name, or 0.
std::size_t html_tag(std::string_view s, std::size_t i, std::string* name) {
  std::size_t j = i + 1;
  if (j < s.size() && s[j] == '/') ++j;
  const auto nb = j;
  while (j < s.size() && alnum(s[j])) ++j;
  if (j == nb) return 0;
  *name = text::lower(s.substr(nb, j - nb));
  if (!inline_html(*name) && !block_html(*name)) return 0;
  if (j < s.size() && s[j] != '>' && s[j] != ' ' && s[j] != '/' && s[j] != '\n') return 0;
  const auto gt = s.find('>', j);
  if (gt == std::string_view::npos) return 0;
  const auto lt = s.find('<', j);
  if (lt != std::string_view::npos && lt < gt) return 0;
  return gt + 1 - i;
}

// Value of an attribute inside a tag, e.g. cref="X".
std::optional<std::string> html_attr(std::string_view tag) {
  for (std::string_view a : {"cref=\"", "name=\"", "langword=\"", "href=\""}) {
    const auto p = tag.find(a);
    if (p == std::string_view::npos) continue;
    const auto q = tag.find('"', p + a.size());
    if (q == std::string_view::npos) continue;
    return std::string(tag.substr(p + a.size(), q - p - a.size()));
  }
  return std::nullopt;
}

std::string html_pass(std::string_view s) {
  static constexpr std::pair<std::string_view, std::string_view> kEntities[] = {
      {"&lt;", "<"}, {"&gt;", ">"}, {"&amp;", "&"}, {"&quot;", "\""},
      {"&#39;", "'"}, {"&apos;", "'"}, {"&nbsp;", " "}};
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '<') {
      std::string name;
      const auto len = html_tag(s, i, &name);
      if (len > 0) {
        const auto tag = s.substr(i, len);
        const bool self_closing = tag.size() >= 2 && tag[tag.size() - 2] == '/';
        if (self_closing && (name == "see" || name == "paramref" || name == "typeparamref")) {
          if (auto v = html_attr(tag)) out += *v;
        } else if (block_html(name) && !out.empty() && out.back() != '\n' && out.back() != ' ') {
          out += ' ';
        }
        i += len;
        continue;
      }
    }
    if (c == '{' && i + 2 < s.size() && s[i + 1] == '@') {
      // {@code X}, {@link X}, {@inheritDoc}
      std::size_t j = i + 2;
      while (j < s.size() && alpha(s[j])) ++j;
      const auto close = s.find('}', j);
      if (j > i + 2 && close != std::string_view::npos) {
        out += trim(s.substr(j, close - j));
        i = close + 1;
        continue;
      }
    }
    if (c == '&') {
      bool hit = false;
      for (const auto& [k, v] : kEntities) {
        if (s.substr(i, k.size()) == k) {
          out += v;
          i += k.size();
          hit = true;
          break;
        }
      }
      if (hit) continue;
    }
    out += c;
    ++i;
  }
  return out;
}

// ---- examples and notes ------------------------------------------------------

bool note_header(std::string_view line) {
  auto t = trim(line);
  if (t.rfind("..", 0) == 0) t = trim(t.substr(2));
  static constexpr std::string_view kWords[] = {
      "for example", "for instance", "example usage", "sample usage", "examples",
      "example", "notes", "note", "usage", "e.g.", "n.b.", "nb"};
  for (auto w : kWords) {
    if (!text::starts_with_ci(t, w)) continue;
    auto rest = t.substr(w.size());
    while (!rest.empty() && rest[0] == ' ') rest.remove_prefix(1);
    if (rest.empty()) return false;
    if (rest[0] == ':' || rest.rfind("- ", 0) == 0) return true;
    return false;
  }
  return false;
}

bool numpy_note_header(const Lines& lines, std::size_t i) {
  if (i + 1 >= lines.size()) return false;
  const auto t = trim(lines[i]);
  if (t != "Examples" && t != "Example" && t != "Notes" && t != "Note") return false;
  const auto u = trim(lines[i + 1]);
  return u.size() >= 3 && u.find_first_not_of('-') == std::string_view::npos;
}

bool numpy_any_header(const Lines& lines, std::size_t i) {
  if (i + 1 >= lines.size() || blank(lines[i])) return false;
  const auto u = trim(lines[i + 1]);
  return u.size() >= 3 && u.find_first_not_of('-') == std::string_view::npos &&
         indent_of(lines[i]) == indent_of(lines[i + 1]);
}

std::string notes_pass(std::string_view in) {
  Lines lines = text::split_lines(in);
  Lines out;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (numpy_note_header(lines, i)) {
      std::size_t j = i + 2;
      while (j < lines.size() && !numpy_any_header(lines, j)) ++j;
      i = j;
      continue;
    }
    if (note_header(lines[i])) {
      i = block_end(lines, i + 1, indent_of(lines[i]));
      continue;
    }
    out.push_back(lines[i++]);
  }
  return text::join_lines(out);
}

// ---- questions ------------------------------------------------------------------

std::string questions_pass(std::string_view s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] != '?' || text::is_space(s[i - 1])) continue;
    if (i + 1 < s.size() && !text::is_space(s[i + 1]) && s[i + 1] != '"' &&
        s[i + 1] != '\'' && s[i + 1] != ')')
      continue;
    std::size_t end = i + 1;
    if (end < s.size() && (s[end] == '"' || s[end] == '\'' || s[end] == ')')) ++end;
    // Sentence start: after ". ", "! ", "? ", a newline, or a " - " separator.
    std::size_t start = 0;
    for (std::size_t k = i; k-- > 0;) {
      if (s[k] == '\n') {
        start = k + 1;
        break;
      }
      if ((s[k] == '.' || s[k] == '!' || s[k] == '?') && k + 1 < s.size() &&
          text::is_space(s[k + 1])) {
        start = k + 1;
        break;
      }
      if (s[k] == '-' && k > 0 && s[k - 1] == ' ' && k + 1 < s.size() && s[k + 1] == ' ') {
        start = k - 1;
        while (start > 0 && s[start - 1] == ' ') --start;
        break;
      }
    }
    std::string out(s.substr(0, start));
    out += s.substr(end);
    return out;
  }
  return std::string(s);
}

// ---- remove predicates -----------------------------------------------------------

bool wip_match(std::string_view s, std::string_view p) {
  if (p.empty()) return false;
  for (auto pos = s.find(p); pos != std::string_view::npos; pos = s.find(p, pos + 1))
    if (pos == 0 || !alnum(s[pos - 1])) return true;
  return false;
}

std::string one_pass(FilterId id, std::string_view t, const FilterConfig& config) {
  switch (id) {
    case FilterId::kStripDelimiters: return delimiters_pass(t);
    case FilterId::kStripHyperlink: return hyperlink_pass(t);
    case FilterId::kStripEmbeddedCode: return embedded_code_pass(t);
    case FilterId::kStripMathFormulas: return math_pass(t);
    case FilterId::kStripMetadataTags: return metadata_pass(t, config);
    case FilterId::kStripHtmlTags: return html_pass(t);
    case FilterId::kHandleExamplesNotes: return notes_pass(t);
    case FilterId::kHandleQuestions: return questions_pass(t);
    default: return std::string(t);
  }
}

std::optional<FilterId> remove_chain(const std::vector<std::string>& tokens,
                                     std::string_view text, std::size_t lo,
                                     std::size_t hi, const FilterConfig& config) {
  if (config.is_enabled(FilterId::kRemoveEmpty) && (blank(text) || tokens.empty()))
    return FilterId::kRemoveEmpty;
  if (config.is_enabled(FilterId::kRemoveBadLength) &&
      (tokens.size() < lo || tokens.size() > hi))
    return FilterId::kRemoveBadLength;
  if (config.is_enabled(FilterId::kRemoveNonEnglish) &&
      LanguageIdentifier::builtin().english_probability(text) < config.english_threshold)
    return FilterId::kRemoveNonEnglish;
  if (config.is_enabled(FilterId::kRemoveAutoGen))
    for (const auto& p : config.autogen_patterns)
      if (contains_ci(text, p)) return FilterId::kRemoveAutoGen;
  if (config.is_enabled(FilterId::kRemoveWip))
    for (const auto& p : config.wip_patterns)
      if (wip_match(text, p)) return FilterId::kRemoveWip;
  return std::nullopt;
}

constexpr std::string_view kNames[kFilterCount] = {
    "StripDelimiters",  "StripMathFormulas", "StripHtmlTags",
    "StripMetadataTags", "StripHyperlink",   "StripEmbeddedCode",
    "RemoveEmpty",      "RemoveBadLength",   "RemoveNonEnglish",
    "RemoveAutoGen",    "RemoveWip",         "HandleQuestions",
    "HandleExamplesNotes"};

}  // namespace

std::string_view filter_name(FilterId id) {
  return kNames[static_cast<std::size_t>(id)];
}

std::optional<FilterId> parse_filter_name(std::string_view name) {
  for (std::size_t i = 0; i < kFilterCount; ++i)
    if (kNames[i] == name) return static_cast<FilterId>(i);
  return std::nullopt;
}

bool is_update_filter(FilterId id) {
  return std::find(kUpdateOrder.begin(), kUpdateOrder.end(), id) != kUpdateOrder.end();
}

FilterConfig FilterConfig::from_json(const nlohmann::json& j) {
  FilterConfig c;
  if (!j.is_object()) throw ConfigError("filter config: expected an object");
  auto bounds = [](const nlohmann::json& b, const char* what, std::size_t& lo,
                   std::size_t& hi) {
    if (!b.is_object()) throw ConfigError(std::string("filter config: ") + what + " must be an object");
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (!it.value().is_number_unsigned())
        throw ConfigError(std::string("filter config: ") + what + "." + it.key() +
                          " must be a non-negative integer");
      if (it.key() == "min") lo = it.value().get<std::size_t>();
      else if (it.key() == "max") hi = it.value().get<std::size_t>();
      else throw ConfigError(std::string("filter config: unknown key ") + what + "." + it.key());
    }
    if (lo > hi) throw ConfigError(std::string("filter config: ") + what + ".min > max");
  };
  auto strings = [](const nlohmann::json& a, const std::string& what) {
    if (!a.is_array()) throw ConfigError("filter config: " + what + " must be an array");
    std::vector<std::string> out;
    for (const auto& s : a) {
      if (!s.is_string() || s.get<std::string>().empty())
        throw ConfigError("filter config: " + what + " entries must be non-empty strings");
      out.push_back(s.get<std::string>());
    }
    return out;
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const auto& v = it.value();
    if (k == "enabled") {
      if (!v.is_object()) throw ConfigError("filter config: enabled must be an object");
      for (auto e = v.begin(); e != v.end(); ++e) {
        const auto id = parse_filter_name(e.key());
        if (!id) throw ConfigError("filter config: unknown filter " + e.key());
        if (!e.value().is_boolean())
          throw ConfigError("filter config: enabled." + e.key() + " must be a boolean");
        c.enabled[static_cast<std::size_t>(*id)] = e.value().get<bool>();
      }
    } else if (k == "length") {
      bounds(v, "length", c.min_tokens, c.max_tokens);
    } else if (k == "inline_length") {
      bounds(v, "inline_length", c.inline_min_tokens, c.inline_max_tokens);
    } else if (k == "english_threshold") {
      if (!v.is_number()) throw ConfigError("filter config: english_threshold must be a number");
      c.english_threshold = v.get<double>();
      if (c.english_threshold < 0.0 || c.english_threshold > 1.0)
        throw ConfigError("filter config: english_threshold must be in [0,1]");
    } else if (k == "autogen_patterns") {
      c.autogen_patterns = strings(v, k);
    } else if (k == "wip_patterns") {
      c.wip_patterns = strings(v, k);
    } else {
      throw ConfigError("filter config: unknown key " + k);
    }
  }
  return c;
}

FilterConfig FilterConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read filter config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("filter config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json FilterConfig::to_json() const {
  nlohmann::json j;
  for (auto id : kAllFilters) j["enabled"][std::string(filter_name(id))] = is_enabled(id);
  j["length"] = {{"min", min_tokens}, {"max", max_tokens}};
  j["inline_length"] = {{"min", inline_min_tokens}, {"max", inline_max_tokens}};
  j["english_threshold"] = english_threshold;
  j["autogen_patterns"] = autogen_patterns;
  j["wip_patterns"] = wip_patterns;
  return j;
}

std::string normalize_text(std::string_view in) {
  std::string s;
  s.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == '\r') {
      if (i + 1 < in.size() && in[i + 1] == '\n') continue;
      s += '\n';
      continue;
    }
    s += in[i];
  }
  return text::cleandoc(s);
}

std::string apply_update_filter(FilterId id, std::string_view text,
                                const FilterConfig& config) {
  std::string cur = normalize_text(text);
  while (true) {
    std::string next = normalize_text(one_pass(id, cur, config));
    if (next == cur || next.size() > cur.size()) return cur;
    cur = std::move(next);
  }
}

UpdateResult apply_update_filters(std::string_view docstring,
                                  const FilterConfig& config) {
  UpdateResult r;
  r.text = normalize_text(docstring);
  for (auto id : kUpdateOrder) {
    if (!config.is_enabled(id)) continue;
    auto next = apply_update_filter(id, r.text, config);
    if (next != r.text) {
      r.applied.push_back(id);
      r.text = std::move(next);
    }
  }
  return r;
}

std::optional<FilterId> apply_remove_filters(const std::vector<std::string>& tokens,
                                             std::string_view docstring,
                                             const FilterConfig& config) {
  return remove_chain(tokens, docstring, config.min_tokens, config.max_tokens, config);
}

std::optional<FilterId> apply_inline_remove_filters(
    const std::vector<std::string>& tokens, std::string_view comment,
    const FilterConfig& config) {
  return remove_chain(tokens, comment, config.inline_min_tokens,
                      config.inline_max_tokens, config);
}

nlohmann::json FilterTrace::to_json() const {
  nlohmann::json j;
  j["key"] = key;
  j["language"] = std::string(language_name(language));
  j["applied"] = nlohmann::json::array();
  for (auto id : applied) j["applied"].push_back(std::string(filter_name(id)));
  j["removed_by"] = removed_by ? nlohmann::json(std::string(filter_name(*removed_by)))
                               : nlohmann::json(nullptr);
  j["text_before"] = text_before;
  j["text_after"] = text_after ? nlohmann::json(*text_after) : nlohmann::json(nullptr);
  return j;
}

FilterTrace clean_pair(ExtractedUnit& unit, const FilterConfig& config) {
  FilterTrace t;
  t.key = unit.key();
  t.language = unit.language;
  t.text_before = unit.docstring_raw.value_or("");
  auto updated = apply_update_filters(t.text_before, config);
  t.applied = std::move(updated.applied);
  auto tokens = tokenize_text(updated.text);
  t.removed_by = apply_remove_filters(tokens, updated.text, config);
  if (!t.removed_by) {
    unit.docstring_tokens = std::move(tokens);
    t.text_after = std::move(updated.text);
  }
  return t;
}

FilterTrace clean_inline(InlineSample& sample, const FilterConfig& config) {
  FilterTrace t;
  t.key = sample.key();
  t.language = sample.language;
  t.text_before = sample.comment;
  auto updated = apply_update_filters(sample.comment, config);
  t.applied = std::move(updated.applied);
  auto tokens = tokenize_text(updated.text);
  t.removed_by = apply_inline_remove_filters(tokens, updated.text, config);
  if (!t.removed_by) {
    sample.comment = updated.text;
    sample.comment_tokens = std::move(tokens);
    t.text_after = std::move(updated.text);
  }
  return t;
}

void FilterReport::add_inputs(LanguageId language, std::size_t n) {
  rows_[language].inputs += n;
}

void FilterReport::add(const FilterTrace& trace) {
  auto& row = rows_[trace.language];
  for (auto id : trace.applied) ++row.touched[static_cast<std::size_t>(id)];
  if (trace.removed_by) {
    ++row.touched[static_cast<std::size_t>(*trace.removed_by)];
    ++row.dropped;
  }
}

void FilterReport::merge(const FilterReport& other) {
  for (const auto& [lang, r] : other.rows_) {
    auto& row = rows_[lang];
    row.inputs += r.inputs;
    row.dropped += r.dropped;
    for (std::size_t i = 0; i < kFilterCount; ++i) row.touched[i] += r.touched[i];
  }
}

std::size_t FilterReport::inputs(std::optional<LanguageId> language) const {
  std::size_t n = 0;
  for (const auto& [lang, r] : rows_)
    if (!language || lang == *language) n += r.inputs;
  return n;
}

std::size_t FilterReport::touched(FilterId id, std::optional<LanguageId> language) const {
  std::size_t n = 0;
  for (const auto& [lang, r] : rows_)
    if (!language || lang == *language) n += r.touched[static_cast<std::size_t>(id)];
  return n;
}

std::size_t FilterReport::dropped(std::optional<LanguageId> language) const {
  std::size_t n = 0;
  for (const auto& [lang, r] : rows_)
    if (!language || lang == *language) n += r.dropped;
  return n;
}

std::size_t FilterReport::kept(std::optional<LanguageId> language) const {
  return inputs(language) - dropped(language);
}

double FilterReport::percentage(FilterId id, std::optional<LanguageId> language) const {
  const auto n = inputs(language);
  if (n == 0) return 0.0;
  return static_cast<double>(touched(id, language)) * 100.0 / static_cast<double>(n);
}

std::string FilterReport::to_csv() const {
  std::ostringstream out;
  out << "filter";
  for (const auto& [lang, r] : rows_) out << ',' << language_name(lang);
  out << ",total\n";
  auto pct = [](double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << v;
    return s.str();
  };
  for (auto id : kAllFilters) {
    out << filter_name(id);
    for (const auto& [lang, r] : rows_) out << ',' << pct(percentage(id, lang));
    out << ',' << pct(percentage(id)) << '\n';
  }
  out << "inputs";
  for (const auto& [lang, r] : rows_) out << ',' << r.inputs;
  out << ',' << inputs() << '\n';
  out << "kept";
  for (const auto& [lang, r] : rows_) out << ',' << kept(lang);
  out << ',' << kept() << '\n';
  return out.str();
}

nlohmann::json FilterReport::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  auto block = [&](std::optional<LanguageId> lang) {
    nlohmann::json b;
    b["inputs"] = inputs(lang);
    b["kept"] = kept(lang);
    b["dropped"] = dropped(lang);
    for (auto id : kAllFilters) {
      b["filters"][std::string(filter_name(id))] = {
          {"count", touched(id, lang)}, {"percent", percentage(id, lang)}};
    }
    return b;
  };
  j["languages"] = nlohmann::json::object();
  for (const auto& [lang, r] : rows_)
    j["languages"][std::string(language_name(lang))] = block(lang);
  j["total"] = block(std::nullopt);
  return j;
}

FilterReport filter_report(const std::vector<FilterTrace>& traces,
                           const std::map<LanguageId, std::size_t>& totals) {
  FilterReport r;
  for (const auto& [lang, n] : totals) r.add_inputs(lang, n);
  for (const auto& t : traces) r.add(t);
  return r;
}

}  // namespace forge
