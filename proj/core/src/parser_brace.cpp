// Structural parser for the brace-delimited languages (C, C++, C#, Java,
// JavaScript, PHP, Go, Rust). Statements and `{}` blocks are recovered from
// the token stream; definitions are recognized from statement headers.
#include <algorithm>
#include <initializer_list>
#include <set>
#include <string>

#include "parser_detail.hpp"

namespace forge::detail {
namespace {

bool one_of(std::string_view s, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

class BraceParser {
 public:
  explicit BraceParser(SyntaxTree& tree)
      : t_(tree), src_(tree.source()), lang_(tree.language()),
        toks_(tree.tokens()) {}

  void run() {
    parse_items(t_.root(), false);
    t_.fix_spans(t_.root());
  }

 private:
  SyntaxTree& t_;
  std::string_view src_;
  LanguageId lang_;
  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  std::set<NodeId> init_blocks_;

  bool eof() const { return pos_ >= toks_.size(); }
  std::string_view text(std::size_t i) const { return toks_[i].text(src_); }
  bool punct(std::size_t i, std::string_view p) const {
    return i < toks_.size() && toks_[i].kind == TokenKind::kPunct &&
           text(i) == p;
  }
  bool word(std::size_t i, std::string_view w) const {
    return i < toks_.size() && toks_[i].kind == TokenKind::kWord &&
           text(i) == w;
  }
  std::size_t next_sig(std::size_t i) const {
    while (i < toks_.size() && (toks_[i].kind == TokenKind::kNewline ||
                                toks_[i].is_comment()))
      ++i;
    return i;
  }
  bool asi() const {
    return lang_ == LanguageId::kGo || lang_ == LanguageId::kJavaScript;
  }

  // Token index of a child node, or -1 for non-token children.
  int tok(NodeId child) const {
    const auto& n = t_.node(child);
    if (n.kind != NodeKind::kToken) return -1;
    return n.token;
  }

  void parse_items(NodeId parent, bool in_block) {
    while (true) {
      if (eof()) {
        if (in_block) t_.node(parent).error = true;
        return;
      }
      const Token& tk = toks_[pos_];
      if (tk.kind == TokenKind::kNewline) {
        ++pos_;
        continue;
      }
      if (tk.is_comment() || tk.kind == TokenKind::kInlineHtml) {
        t_.add_token(parent, static_cast<int>(pos_++));
        continue;
      }
      if (punct(pos_, "}")) {
        if (in_block) return;
        const auto e = t_.add(NodeKind::kError, parent, tk.begin, tk.end);
        t_.add_token(e, static_cast<int>(pos_++));
        continue;
      }
      if (tk.kind == TokenKind::kPreproc) {
        const auto s = t_.add(NodeKind::kStatement, parent, tk.begin, tk.end);
        t_.add_token(s, static_cast<int>(pos_++));
        continue;
      }
      parse_statement(parent);
    }
  }

  NodeId parse_block(NodeId stmt) {
    const Token& open = toks_[pos_];
    const auto b = t_.add(NodeKind::kBlock, stmt, open.begin, open.end);
    t_.add_token(b, static_cast<int>(pos_++));
    parse_items(b, true);
    if (!eof() && punct(pos_, "}"))
      t_.add_token(b, static_cast<int>(pos_++));
    else
      t_.node(b).error = true;
    t_.fix_spans(b);
    return b;
  }

  void parse_statement(NodeId parent) {
    const Token& first = toks_[pos_];
    const auto s = t_.add(NodeKind::kStatement, parent, first.begin, first.end);
    const std::size_t first_tok = pos_;
    std::vector<std::pair<char, std::size_t>> open;
    long last_code = -1;
    while (!eof()) {
      const Token& tk = toks_[pos_];
      if (tk.kind == TokenKind::kNewline) {
        if (asi() && open.empty() && last_code >= 0 &&
            asi_ends(static_cast<std::size_t>(last_code), first_tok)) {
          ++pos_;
          break;
        }
        ++pos_;
        continue;
      }
      if (tk.kind == TokenKind::kPunct) {
        const auto p = text(pos_);
        if (p == ";" && open.empty()) {
          t_.add_token(s, static_cast<int>(pos_++));
          break;
        }
        if (p == "(" || p == "[") {
          open.push_back({p[0], pos_});
        } else if (p == ")" || p == "]") {
          const char want = p == ")" ? '(' : '[';
          if (!open.empty() && open.back().first == want) {
            open.pop_back();
          } else {
            t_.node(s).error = true;
            for (std::size_t k = open.size(); k-- > 0;) {
              if (open[k].first == want) {
                open.resize(k);
                break;
              }
            }
          }
        } else if (p == "{") {
          const auto b = parse_block(s);
          last_code = static_cast<long>(pos_) - 1;
          maybe_wrap_function(s, b);
          if (open.empty() && block_ends_statement(s, b, first_tok)) break;
          continue;
        } else if (p == "}") {
          if (!open.empty()) t_.node(s).error = true;
          break;
        }
      }
      if (tk.is_code() && tk.kind != TokenKind::kPreproc)
        last_code = static_cast<long>(pos_);
      t_.add_token(s, static_cast<int>(pos_++));
    }
    if (!open.empty()) t_.node(s).error = true;
    t_.fix_spans(s);
    classify(s);
  }

  bool asi_ends(std::size_t last, std::size_t first_tok) const {
    const Token& lt = toks_[last];
    const auto lx = text(last);
    bool can_end = false;
    if (lt.kind == TokenKind::kWord) {
      if (lang_ == LanguageId::kGo)
        can_end = !one_of(lx, {"if", "else", "for", "switch", "case", "func",
                               "go", "defer", "var", "const", "type",
                               "package", "import", "struct", "interface",
                               "map", "chan", "range", "select", "default"});
      else
        can_end = !one_of(lx, {"if", "else", "for", "while", "do", "var",
                               "let", "const", "new", "typeof", "instanceof",
                               "in", "of", "case", "extends", "function",
                               "class", "export", "import", "async", "await",
                               "delete", "void"});
    } else if (lt.kind == TokenKind::kNumber ||
               lt.kind == TokenKind::kString) {
      can_end = true;
    } else if (lt.kind == TokenKind::kPunct) {
      can_end = one_of(lx, {")", "]", "}", "++", "--"});
      if (lang_ == LanguageId::kJavaScript && lx == ")" &&
          toks_[first_tok].kind == TokenKind::kWord &&
          one_of(text(first_tok), {"if", "for", "while", "with"}))
        can_end = false;
    }
    if (!can_end) return false;
    const auto n = next_sig(pos_);
    if (n >= toks_.size()) return true;
    if (toks_[n].kind == TokenKind::kPunct) {
      const auto nx = text(n);
      if (one_of(nx, {",", "=", "==", "===", "!=", "!==", "&&", "||", "??",
                      "?", "+", "-", "*", "/", "%", "=>", "|", "&", "^",
                      "<", ">", "<=", ">="}))
        return false;
      if (lang_ == LanguageId::kJavaScript && one_of(nx, {".", "?.", ":"}))
        return false;
    }
    if (lang_ == LanguageId::kJavaScript && toks_[n].kind == TokenKind::kWord &&
        one_of(text(n), {"instanceof", "in", "of"}))
      return false;
    return true;
  }

  // Code-token children of `s` before child index `limit`, as token indices.
  std::vector<std::size_t> code_before(NodeId s, std::size_t limit) const {
    std::vector<std::size_t> out;
    const auto& ch = t_.node(s).children;
    for (std::size_t i = 0; i < limit && i < ch.size(); ++i) {
      const int k = tok(ch[i]);
      if (k >= 0 && toks_[static_cast<std::size_t>(k)].is_code() &&
          toks_[static_cast<std::size_t>(k)].kind != TokenKind::kPreproc)
        out.push_back(static_cast<std::size_t>(k));
    }
    return out;
  }

  bool block_ends_statement(NodeId s, NodeId b, std::size_t first_tok) {
    const auto& ch = t_.node(s).children;
    const std::size_t bi = static_cast<std::size_t>(
        std::find(ch.begin(), ch.end(), b) - ch.begin());
    const auto header = code_before(s, bi);
    const std::size_t n = next_sig(pos_);
    if (n >= toks_.size()) return true;
    const auto nx = text(n);
    const bool same_line = toks_[n].line == toks_[pos_ - 1].line;

    if (lang_ == LanguageId::kCpp && !header.empty() && bi > 0) {
      // Constructor initializer braces: `: a_{x}, b_{y} {`.
      const auto last = header.back();
      if (toks_[last].kind == TokenKind::kWord && header.size() >= 2) {
        const auto before = text(header[header.size() - 2]);
        bool saw_paren = false;
        for (auto k : header)
          if (text(k) == ")") saw_paren = true;
        if ((before == ":" || before == ",") && saw_paren) {
          init_blocks_.insert(b);
          return false;
        }
      }
    }
    if (toks_[n].kind == TokenKind::kWord) {
      if (one_of(nx, {"else", "catch", "finally"})) return false;
      if (nx == "while" && word(first_tok, "do")) return false;
    }
    if (toks_[n].kind == TokenKind::kPunct) {
      if (one_of(nx, {";", ")", ",", ".", "?.", "->", "]"})) return false;
      if ((nx == "(" || nx == "[") && same_line) return false;
    }
    if (word(first_tok, "case") || word(first_tok, "default")) return true;
    if (!header.empty()) {
      const auto last = text(header.back());
      if (toks_[header.back()].kind == TokenKind::kPunct &&
          one_of(last, {"=", ",", ":", "=>", "?", "||", "&&", "??", "return"}))
        return false;
      if (word(header.back(), "return")) return false;
      if (!word(first_tok, "template")) {
        for (auto k : header)
          if (toks_[k].kind == TokenKind::kPunct && text(k) == "=")
            return false;
      }
    }
    return true;
  }

  // Finds the token at child index `i` of `s` walking backwards over
  // comments; returns -1 if none.
  long prev_code_child(NodeId s, long i) const {
    const auto& ch = t_.node(s).children;
    while (i >= 0) {
      const int k = tok(ch[static_cast<std::size_t>(i)]);
      if (k >= 0 && toks_[static_cast<std::size_t>(k)].is_code()) return i;
      if (k < 0 && t_.node(ch[static_cast<std::size_t>(i)]).kind !=
                       NodeKind::kComment)
        return i;
      --i;
    }
    return -1;
  }

  std::string_view child_text(NodeId s, long i) const {
    const int k = tok(t_.node(s).children[static_cast<std::size_t>(i)]);
    return k < 0 ? std::string_view{} : text(static_cast<std::size_t>(k));
  }
  bool child_is_word(NodeId s, long i) const {
    const int k = tok(t_.node(s).children[static_cast<std::size_t>(i)]);
    return k >= 0 && toks_[static_cast<std::size_t>(k)].kind == TokenKind::kWord;
  }

  // Walks back from child `i` (a closing paren) to its opening paren.
  long match_open(NodeId s, long i) const {
    int depth = 0;
    for (; i >= 0; --i) {
      const auto tx = child_text(s, i);
      if (tx == ")" || tx == "]") ++depth;
      if (tx == "(" || tx == "[") {
        if (--depth == 0) return i;
      }
    }
    return -1;
  }

  std::string name_from_assignment(NodeId s, long start) const {
    const long p = prev_code_child(s, start - 1);
    if (p < 0) return {};
    const auto op = child_text(s, p);
    if (!one_of(op, {"=", ":", ":="})) return {};
    const long q = prev_code_child(s, p - 1);
    if (q < 0) return {};
    if (child_is_word(s, q)) return std::string(child_text(s, q));
    const int k = tok(t_.node(s).children[static_cast<std::size_t>(q)]);
    if (k >= 0 && toks_[static_cast<std::size_t>(k)].kind == TokenKind::kString &&
        op == ":") {
      auto str = child_text(s, q);
      if (str.size() >= 2) return std::string(str.substr(1, str.size() - 2));
    }
    return {};
  }

  // JS/PHP `function` expressions and arrows, Go `func` declarations and
  // literals become function nodes as soon as their body closes.
  void maybe_wrap_function(NodeId s, NodeId b) {
    if (lang_ != LanguageId::kJavaScript && lang_ != LanguageId::kPhp &&
        lang_ != LanguageId::kGo)
      return;
    if (t_.node(s).error) return;
    const auto& ch = t_.node(s).children;
    const long bi = static_cast<long>(
        std::find(ch.begin(), ch.end(), b) - ch.begin());
    long start = -1;
    std::string name;
    const long before = prev_code_child(s, bi - 1);
    if (before < 0) return;

    if (lang_ == LanguageId::kJavaScript && child_text(s, before) == "=>") {
      long p = prev_code_child(s, before - 1);
      if (p < 0) return;
      if (child_text(s, p) == ")") {
        p = match_open(s, p);
        if (p < 0) return;
      } else if (!child_is_word(s, p)) {
        return;
      }
      start = p;
      const long a = prev_code_child(s, p - 1);
      if (a >= 0 && child_text(s, a) == "async") start = a;
      name = name_from_assignment(s, start);
    } else {
      const std::string_view kw = lang_ == LanguageId::kGo ? "func" : "function";
      int depth = 0;
      long kw_at = -1;
      for (long i = before, steps = 0; i >= 0 && steps < 512; --i, ++steps) {
        const NodeId c = ch[static_cast<std::size_t>(i)];
        const auto kind = t_.node(c).kind;
        if (kind == NodeKind::kComment) continue;
        if (kind != NodeKind::kToken) {
          // Go signatures may contain `struct{}` / `interface{}` types.
          const long p = prev_code_child(s, i - 1);
          if (lang_ == LanguageId::kGo && kind == NodeKind::kBlock && p >= 0 &&
              one_of(child_text(s, p), {"struct", "interface"}))
            continue;
          return;
        }
        const auto tx = child_text(s, i);
        if (tx == ")" || tx == "]") ++depth;
        if (tx == "(" || tx == "[") {
          if (depth == 0) return;
          --depth;
        }
        if (depth > 0) continue;
        if (child_is_word(s, i) && tx == kw) {
          kw_at = i;
          break;
        }
        if (one_of(tx, {"=", ":=", ";", ",", "=>", "&&", "||", "??"})) return;
        if (child_is_word(s, i) &&
            one_of(tx, {"return", "new", "go", "defer", "yield", "await"}))
          return;
      }
      if (kw_at < 0) return;
      start = kw_at;
      if (lang_ == LanguageId::kJavaScript) {
        const long a = prev_code_child(s, kw_at - 1);
        if (a >= 0 && child_text(s, a) == "async") start = a;
      }
      if (lang_ == LanguageId::kPhp) {
        // Modifiers belong to the method declaration.
        for (long a = prev_code_child(s, start - 1);
             a >= 0 && child_is_word(s, a) &&
             one_of(child_text(s, a), {"public", "private", "protected",
                                       "static", "abstract", "final"});
             a = prev_code_child(s, a - 1))
          start = a;
      }
      long n = kw_at + 1;
      auto next_code = [&](long i) {
        while (i < bi && tok(ch[static_cast<std::size_t>(i)]) >= 0 &&
               !toks_[static_cast<std::size_t>(tok(ch[static_cast<std::size_t>(i)]))]
                    .is_code())
          ++i;
        return i;
      };
      n = next_code(n);
      if (lang_ == LanguageId::kGo) {
        if (n < bi && child_text(s, n) == "(") {
          int d = 0;
          long m = n;
          for (; m < bi; ++m) {
            const auto tx = child_text(s, m);
            if (tx == "(") ++d;
            if (tx == ")" && --d == 0) break;
          }
          const long after = next_code(m + 1);
          if (after + 1 < bi && child_is_word(s, after) &&
              child_text(s, next_code(after + 1)) == "(")
            name = std::string(child_text(s, after));
        } else if (n < bi && child_is_word(s, n)) {
          name = std::string(child_text(s, n));
        }
      } else {
        if (n < bi && one_of(child_text(s, n), {"*", "&"})) n = next_code(n + 1);
        if (n < bi && child_is_word(s, n)) name = std::string(child_text(s, n));
      }
      if (name.empty()) name = name_from_assignment(s, start);
    }
    const auto d = wrap_children(t_, s, static_cast<std::size_t>(start),
                                 static_cast<std::size_t>(bi),
                                 NodeKind::kFunction);
    auto& dn = t_.node(d);
    dn.body = b;
    if (name.empty()) {
      dn.anonymous = true;
      dn.name = anonymous_name(t_, d);
    } else {
      dn.name = std::move(name);
    }
  }

  // ---- header classification -------------------------------------------

  std::set<std::string_view> class_keywords() const {
    switch (lang_) {
      case LanguageId::kCpp: return {"class", "struct", "union"};
      case LanguageId::kJava: return {"class", "interface", "record"};
      case LanguageId::kCSharp: return {"class", "struct", "interface", "record"};
      case LanguageId::kJavaScript: return {"class"};
      case LanguageId::kPhp: return {"class", "interface", "trait"};
      case LanguageId::kRust: return {"struct", "enum", "trait", "impl", "union"};
      default: return {};
    }
  }

  // Skips a balanced `<...>` starting at header[i] == "<"; returns the index
  // after it.
  std::size_t skip_angles(const std::vector<std::size_t>& h, std::size_t i) const {
    int depth = 0;
    for (; i < h.size(); ++i) {
      const auto tx = text(h[i]);
      if (tx == "<") ++depth;
      else if (tx == ">") --depth;
      else if (tx == ">>") depth -= 2;
      else if (tx == "<<") depth += 2;
      if (depth <= 0) return i + 1;
    }
    return i;
  }

  // Last identifier of a path such as `a::b::C<T>`.
  std::string path_name(const std::vector<std::size_t>& h, std::size_t i) const {
    std::string name;
    while (i < h.size() &&
           (one_of(text(h[i]), {"&", "dyn", "mut", "unsafe", "const"}) ||
            toks_[h[i]].kind == TokenKind::kString))
      ++i;
    for (; i < h.size(); ++i) {
      if (toks_[h[i]].kind == TokenKind::kWord) {
        if (one_of(text(h[i]), {"where", "for"})) break;
        name = std::string(text(h[i]));
      } else if (text(h[i]) != "::") {
        break;
      }
    }
    return name;
  }

  std::string class_name(const std::vector<std::size_t>& h, std::size_t kw) const {
    const auto kwt = text(h[kw]);
    if (lang_ == LanguageId::kRust && kwt == "impl") {
      std::size_t i = kw + 1;
      if (i < h.size() && text(h[i]) == "<") i = skip_angles(h, i);
      for (std::size_t j = i; j < h.size(); ++j) {
        if (text(h[j]) == "<") j = skip_angles(h, j) - 1;
        else if (word(h[j], "for")) return path_name(h, j + 1);
      }
      return path_name(h, i);
    }
    if (lang_ == LanguageId::kCpp) {
      std::string name;
      for (std::size_t i = kw + 1; i < h.size(); ++i) {
        const auto tx = text(h[i]);
        if (tx == ":" || tx == "{") break;
        if (tx == "<") {
          i = skip_angles(h, i) - 1;
          continue;
        }
        if (toks_[h[i]].kind == TokenKind::kWord && tx != "final" &&
            tx != "alignas")
          name = std::string(tx);
      }
      return name;
    }
    for (std::size_t i = kw + 1; i < h.size(); ++i) {
      if (toks_[h[i]].kind == TokenKind::kWord) return std::string(text(h[i]));
      if (text(h[i]) != "::") break;
    }
    return {};
  }

  // Returns true and fills `name` if the header declares a class.
  bool header_class(const std::vector<std::size_t>& h, std::size_t h0,
                    std::string& name) const {
    const auto kws = class_keywords();
    if (kws.empty()) return false;
    std::size_t i = h0;
    if (lang_ == LanguageId::kCpp && i < h.size() && word(h[i], "template")) {
      ++i;
      if (i < h.size() && text(h[i]) == "<") i = skip_angles(h, i);
    }
    int depth = 0;
    bool saw_call = false;
    for (; i < h.size(); ++i) {
      const auto tx = text(h[i]);
      if (tx == "(" && depth == 0 && !(i >= 2 && text(h[i - 2]) == "@"))
        saw_call = true;
      if (tx == "(" || tx == "[") ++depth;
      if (tx == ")" || tx == "]") --depth;
      if (depth != 0) continue;
      if (tx == "=" || word(h[i], "where")) return false;
      if (saw_call) continue;
      if (toks_[h[i]].kind == TokenKind::kWord && kws.count(tx)) {
        if (i > h0 && (word(h[i - 1], "enum") || text(h[i - 1]) == "." ||
                       text(h[i - 1]) == "::"))
          return false;
        if (lang_ != LanguageId::kJava) {
          for (std::size_t j = i + 1; j < h.size(); ++j)
            if (text(h[j]) == "(") return false;
        }
        name = class_name(h, i);
        if (name.empty()) name = "<anonymous>";
        return true;
      }
      if (lang_ == LanguageId::kCpp && (tx == "(")) return false;
    }
    return false;
  }

  bool header_function(const std::vector<std::size_t>& h, std::size_t h0,
                       std::string& name) const {
    if (lang_ == LanguageId::kPhp || lang_ == LanguageId::kGo) return false;
    if (h0 >= h.size()) return false;
    if (lang_ == LanguageId::kRust) {
      for (std::size_t i = h0; i + 1 < h.size(); ++i) {
        if (text(h[i]) == "=") return false;
        if (word(h[i], "fn") && toks_[h[i + 1]].kind == TokenKind::kWord) {
          name = std::string(text(h[i + 1]));
          return true;
        }
      }
      return false;
    }
    const auto first = text(h[h0]);
    if (toks_[h[h0]].kind == TokenKind::kWord &&
        one_of(first, {"if", "else", "for", "while", "do", "switch", "case",
                       "default", "try", "catch", "finally", "synchronized",
                       "using", "lock", "foreach", "fixed", "checked",
                       "unchecked", "unsafe", "return", "throw", "new",
                       "namespace", "extern", "enum", "typedef", "sizeof",
                       "static_assert", "with",
                       "module", "package", "import", "goto", "await",
                       "yield", "delete", "void", "typeof", "const", "let",
                       "var"}) &&
        !(lang_ != LanguageId::kJavaScript &&
          one_of(first, {"void", "const", "unsafe", "extern"})))
      return false;
    std::size_t i = h0;
    if (lang_ == LanguageId::kCpp && word(h[i], "template")) {
      ++i;
      if (i < h.size() && text(h[i]) == "<") i = skip_angles(h, i);
    }
    int depth = 0;
    for (; i < h.size(); ++i) {
      const auto tx = text(h[i]);
      if (depth == 0 && toks_[h[i]].kind == TokenKind::kPunct) {
        if (tx == "=" && !(i > 0 && word(h[i - 1], "operator"))) return false;
        if (tx == "." || tx == "=>" || tx == "?.") return false;
      }
      if (depth == 0 && word(h[i], "new")) return false;
      if (tx == "(" && depth == 0) {
        if (i == h0) return false;
        std::size_t n = i - 1;
        // Annotations and attributes: `@Foo(...)`, `__attribute__((...))`.
        const bool attr =
            (n > 0 && text(h[n - 1]) == "@") ||
            one_of(text(h[n]), {"__attribute__", "__declspec", "alignas",
                                "__attribute", "decltype"});
        if (!attr) return function_name(h, h0, n, name);
      }
      if (tx == "(" || tx == "[") ++depth;
      if (tx == ")" || tx == "]") --depth;
    }
    return false;
  }

  bool function_name(const std::vector<std::size_t>& h, std::size_t h0,
                     std::size_t n, std::string& name) const {
    // `operator==`, `operator()`.
    for (std::size_t k = n + 1; k-- > h0 && n - k < 4;) {
      if (word(h[k], "operator")) {
        name = "operator";
        for (std::size_t j = k + 1; j <= n; ++j) name += text(h[j]);
        if (k + 1 > n) name = "operator()";
        return true;
      }
    }
    if (text(h[n]) == ">" || text(h[n]) == ">>") {
      int depth = 0;
      while (true) {
        const auto tx = text(h[n]);
        if (tx == ">") ++depth;
        else if (tx == ">>") depth += 2;
        else if (tx == "<") --depth;
        if (depth <= 0 || n == h0) break;
        --n;
      }
      if (n == h0) return false;
      --n;
    }
    if (toks_[h[n]].kind != TokenKind::kWord) return false;
    const auto nt = text(h[n]);
    if (one_of(nt, {"if", "for", "while", "switch", "catch", "return",
                    "sizeof", "new", "typeof", "using", "lock", "foreach",
                    "fixed", "throw", "super", "this", "function", "when",
                    "base", "await", "else", "do", "with", "synchronized",
                    "try", "checked", "unchecked", "default", "case"}))
      return false;
    name = std::string(nt);
    if (lang_ == LanguageId::kCpp) {
      while (n >= h0 + 1 && text(h[n - 1]) == "~") {
        name = "~" + name;
        --n;
      }
      while (n >= h0 + 2 && text(h[n - 1]) == "::" &&
             toks_[h[n - 2]].kind == TokenKind::kWord) {
        name = std::string(text(h[n - 2])) + "::" + name;
        n -= 2;
      }
    }
    return true;
  }

  void classify(NodeId s) {
    if (t_.node(s).error) return;
    const auto& ch = t_.node(s).children;
    std::size_t bi = ch.size();
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const auto kind = t_.node(ch[i]).kind;
      if (kind == NodeKind::kFunction || kind == NodeKind::kClass) return;
      if (kind == NodeKind::kBlock && !init_blocks_.count(ch[i])) {
        bi = i;
        break;
      }
    }
    if (bi == ch.size()) return;
    for (std::size_t i = bi + 1; i < ch.size(); ++i) {
      const int k = tok(ch[i]);
      if (t_.node(ch[i]).kind == NodeKind::kComment) continue;
      if (k < 0 || text(static_cast<std::size_t>(k)) != ";") return;
    }
    const auto header = code_before(s, bi);
    if (header.empty()) return;
    std::size_t h0 = 0;
    if (lang_ == LanguageId::kJavaScript) {
      while (h0 < header.size() && one_of(text(header[h0]), {"export", "default"}))
        ++h0;
    }
    std::string name;
    NodeKind kind;
    if (header_class(header, h0, name)) {
      kind = NodeKind::kClass;
    } else if (header_function(header, h0, name)) {
      kind = NodeKind::kFunction;
    } else {
      return;
    }
    // The definition starts at the first header token kept after h0.
    std::size_t first_child = 0;
    const auto start_tok = header[h0];
    for (std::size_t i = 0; i < bi; ++i) {
      if (tok(ch[i]) == static_cast<int>(start_tok)) {
        first_child = i;
        break;
      }
    }
    const NodeId body = ch[bi];
    const auto d = wrap_children(t_, s, first_child, bi, kind);
    auto& dn = t_.node(d);
    dn.body = body;
    if (name == "<anonymous>") {
      dn.anonymous = true;
      dn.name = anonymous_name(t_, d);
    } else {
      dn.name = std::move(name);
    }
  }
};

}  // namespace

NodeId wrap_children(SyntaxTree& tree, NodeId parent, std::size_t first,
                     std::size_t last, NodeKind kind) {
  std::vector<NodeId> moved(tree.node(parent).children.begin() +
                                static_cast<long>(first),
                            tree.node(parent).children.begin() +
                                static_cast<long>(last) + 1);
  const auto d = tree.add(kind, kNoNode, 0, 0);
  tree.node(d).parent = parent;
  for (auto id : moved) tree.node(id).parent = d;
  tree.node(d).children = moved;
  auto& pc = tree.node(parent).children;
  pc.erase(pc.begin() + static_cast<long>(first),
           pc.begin() + static_cast<long>(last) + 1);
  pc.insert(pc.begin() + static_cast<long>(first), d);
  tree.fix_spans(d);
  return d;
}

std::string anonymous_name(const SyntaxTree& tree, NodeId id) {
  return "<anonymous:" + std::to_string(tree.start_line(id)) + ">";
}

void parse_brace(SyntaxTree& tree) { BraceParser(tree).run(); }

}  // namespace forge::detail
