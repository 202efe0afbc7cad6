// Keyword/`end` structured parser for Ruby.
#include <algorithm>
#include <initializer_list>

#include "parser_detail.hpp"

namespace forge::detail {
namespace {

bool one_of(std::string_view s, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

class RubyParser {
 public:
  explicit RubyParser(SyntaxTree& tree)
      : t_(tree), src_(tree.source()), toks_(tree.tokens()) {}

  void run() {
    parse_items(t_.root(), false);
    t_.fix_spans(t_.root());
  }

 private:
  SyntaxTree& t_;
  std::string_view src_;
  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;

  bool eof() const { return pos_ >= toks_.size(); }
  std::string_view text(std::size_t i) const { return toks_[i].text(src_); }
  bool is_word(std::size_t i) const {
    return i < toks_.size() && toks_[i].kind == TokenKind::kWord;
  }
  bool is_punct(std::size_t i, std::string_view p) const {
    return i < toks_.size() && toks_[i].kind == TokenKind::kPunct &&
           text(i) == p;
  }
  // Previous code token index before i, or npos.
  std::size_t prev_code(std::size_t i) const {
    while (i > 0) {
      --i;
      if (toks_[i].is_code()) return i;
    }
    return static_cast<std::size_t>(-1);
  }
  bool after_dot(std::size_t i) const {
    const auto p = prev_code(i);
    return p != static_cast<std::size_t>(-1) &&
           toks_[p].kind == TokenKind::kPunct &&
           one_of(text(p), {".", "&.", "::"});
  }
  // `class:` style hash keys.
  bool is_label(std::size_t i) const {
    return i + 1 < toks_.size() && is_punct(i + 1, ":") &&
           toks_[i + 1].begin == toks_[i].end;
  }
  bool keyword(std::size_t i, std::string_view kw) const {
    return is_word(i) && text(i) == kw && !after_dot(i) && !is_label(i);
  }

  void parse_items(NodeId parent, bool until_end) {
    while (true) {
      if (eof()) {
        if (until_end) t_.node(parent).error = true;
        return;
      }
      const Token& tk = toks_[pos_];
      if (tk.kind == TokenKind::kNewline) {
        ++pos_;
        continue;
      }
      if (tk.is_comment() || is_punct(pos_, ";")) {
        t_.add_token(parent, static_cast<int>(pos_++));
        continue;
      }
      if (keyword(pos_, "end")) {
        if (until_end) return;
        const auto e = t_.add(NodeKind::kError, parent, tk.begin, tk.end);
        t_.add_token(e, static_cast<int>(pos_++));
        continue;
      }
      parse_statement(parent);
    }
  }

  bool continues(std::size_t last) const {
    if (last == static_cast<std::size_t>(-1)) return true;
    const auto lx = text(last);
    if (toks_[last].kind == TokenKind::kPunct &&
        one_of(lx, {",", ".", "&.", "+", "-", "*", "/", "=", "==", "&&", "||",
                    "?", ":", "(", "[", "{", "<<", "+=", "-=", "*=", "/=",
                    "||=", "&&=", "=>", "&", "\\", "**", "%", "!=", "<", ">",
                    "<=", ">=", "<=>", "=~", "!~", "::"}))
      return true;
    if (toks_[last].kind == TokenKind::kWord && one_of(lx, {"and", "or", "not"}))
      return true;
    std::size_t n = pos_;
    while (n < toks_.size() && (toks_[n].kind == TokenKind::kNewline ||
                                toks_[n].is_comment()))
      ++n;
    return n < toks_.size() && toks_[n].kind == TokenKind::kPunct &&
           one_of(text(n), {".", "&."});
  }

  bool opener(std::size_t i, bool expr_start) const {
    if (!is_word(i) || after_dot(i) || is_label(i)) return false;
    const auto w = text(i);
    if (one_of(w, {"def", "class", "module", "do"})) return true;
    if (one_of(w, {"if", "unless", "while", "until", "case", "begin", "for"}))
      return expr_start;
    return false;
  }

  static bool starts_expression(const Token& tk, std::string_view tx) {
    if (tk.kind == TokenKind::kPunct)
      return !one_of(tx, {")", "]", "}"});
    if (tk.kind == TokenKind::kWord)
      return one_of(tx, {"return", "and", "or", "not", "then", "do", "else",
                         "elsif", "when", "in", "if", "unless", "while",
                         "until", "break", "next", "yield"});
    return false;
  }

  void parse_statement(NodeId parent) {
    const auto s = t_.add(NodeKind::kStatement, parent, toks_[pos_].begin,
                          toks_[pos_].end);
    std::vector<char> open;
    bool expr_start = true;
    std::size_t last = static_cast<std::size_t>(-1);
    while (!eof()) {
      const Token& tk = toks_[pos_];
      if (tk.kind == TokenKind::kNewline) {
        if (!open.empty() || continues(last)) {
          ++pos_;
          continue;
        }
        ++pos_;
        break;
      }
      if (tk.is_comment()) {
        t_.add_token(s, static_cast<int>(pos_++));
        continue;
      }
      if (open.empty() && is_punct(pos_, ";")) {
        t_.add_token(s, static_cast<int>(pos_++));
        break;
      }
      if (keyword(pos_, "end")) {
        if (!open.empty()) t_.node(s).error = true;
        break;
      }
      if (opener(pos_, expr_start)) {
        parse_construct(s);
        last = pos_ - 1;
        expr_start = false;
        continue;
      }
      if (tk.kind == TokenKind::kPunct) {
        const auto p = text(pos_);
        if (p == "(" || p == "[" || p == "{") {
          open.push_back(p[0]);
        } else if (p == ")" || p == "]" || p == "}") {
          const char want = p == ")" ? '(' : p == "]" ? '[' : '{';
          if (!open.empty() && open.back() == want) open.pop_back();
          else t_.node(s).error = true;
        }
      }
      expr_start = starts_expression(tk, text(pos_));
      if (tk.is_code()) last = pos_;
      t_.add_token(s, static_cast<int>(pos_++));
    }
    if (!open.empty()) t_.node(s).error = true;
    t_.fix_spans(s);
  }

  // Consumes header tokens up to the end of the line. Returns false for an
  // endless method definition (`def f(x) = x`), which has no body.
  bool parse_header(NodeId c, std::string_view kw) {
    std::vector<char> open;
    bool after_params = kw != "def";
    if (kw == "do") {
      std::size_t n = pos_;
      if (is_punct(n, "|") || is_punct(n, "||")) {
        t_.add_token(c, static_cast<int>(pos_++));
        if (text(n) == "|") {
          while (!eof() && toks_[pos_].kind != TokenKind::kNewline) {
            const bool close = is_punct(pos_, "|");
            t_.add_token(c, static_cast<int>(pos_++));
            if (close) break;
          }
        }
      }
    }
    while (!eof()) {
      const Token& tk = toks_[pos_];
      if (tk.kind == TokenKind::kNewline) {
        if (!open.empty()) {
          ++pos_;
          continue;
        }
        ++pos_;
        return true;
      }
      if (tk.is_comment()) {
        t_.add_token(c, static_cast<int>(pos_++));
        continue;
      }
      if (open.empty()) {
        if (is_punct(pos_, ";")) {
          t_.add_token(c, static_cast<int>(pos_++));
          return true;
        }
        if ((kw == "if" || kw == "unless" || kw == "case") &&
            keyword(pos_, "then")) {
          t_.add_token(c, static_cast<int>(pos_++));
          return true;
        }
        if ((kw == "while" || kw == "until" || kw == "for") &&
            keyword(pos_, "do")) {
          t_.add_token(c, static_cast<int>(pos_++));
          return true;
        }
        if (kw == "def" && is_punct(pos_, "=") && after_params) return false;
        if (kw == "def" && kw != "do" && keyword(pos_, "end")) return true;
      }
      if (tk.kind == TokenKind::kPunct) {
        const auto p = text(pos_);
        if (p == "(" || p == "[" || p == "{") open.push_back(p[0]);
        else if ((p == ")" || p == "]" || p == "}") && !open.empty()) {
          open.pop_back();
          if (open.empty()) after_params = true;
        }
      }
      if (kw == "def" && tk.is_code() && open.empty() &&
          toks_[pos_].kind == TokenKind::kWord)
        after_params = true;
      t_.add_token(c, static_cast<int>(pos_++));
    }
    return true;
  }

  std::string def_name(NodeId d) const {
    // Contiguous tokens after `def` up to the parameter list;
    // `self.foo` -> `foo`, `[]=` stays whole.
    std::string name;
    const auto& ch = t_.node(d).children;
    std::size_t prev_end = 0;
    for (std::size_t i = 1; i < ch.size(); ++i) {
      const auto& n = t_.node(ch[i]);
      if (n.kind != NodeKind::kToken) break;
      const auto k = static_cast<std::size_t>(n.token);
      if (!toks_[k].is_code()) break;
      if (i > 1 && toks_[k].begin != prev_end) break;
      const auto tx = text(k);
      if (tx == "(" || tx == ";") break;
      prev_end = toks_[k].end;
      if (tx == ".") {
        name.clear();
        continue;
      }
      name += tx;
    }
    return name;
  }

  std::string class_name(NodeId d) const {
    std::string name;
    const auto& ch = t_.node(d).children;
    for (std::size_t i = 1; i < ch.size(); ++i) {
      const auto& n = t_.node(ch[i]);
      if (n.kind != NodeKind::kToken) break;
      const auto k = static_cast<std::size_t>(n.token);
      if (toks_[k].kind == TokenKind::kWord) name = std::string(text(k));
      else if (text(k) != "::") break;
    }
    return name;
  }

  void parse_construct(NodeId s) {
    const std::string_view kw = text(pos_);
    NodeId c = s;
    const bool singleton = kw == "class" && is_punct(pos_ + 1, "<<");
    if (kw == "def") {
      c = t_.add(NodeKind::kFunction, s, toks_[pos_].begin, toks_[pos_].end);
    } else if (kw == "class" && !singleton) {
      c = t_.add(NodeKind::kClass, s, toks_[pos_].begin, toks_[pos_].end);
    }
    t_.add_token(c, static_cast<int>(pos_++));
    if (!parse_header(c, kw)) {
      // Endless def: the rest of the line is the body expression.
      t_.node(c).kind = NodeKind::kStatement;
      while (!eof() && toks_[pos_].kind != TokenKind::kNewline &&
             !is_punct(pos_, ";"))
        t_.add_token(c, static_cast<int>(pos_++));
      t_.fix_spans(c);
      return;
    }
    const auto b = t_.add(NodeKind::kBlock, c, pos_ < toks_.size() ? toks_[pos_].begin
                                                                  : static_cast<std::uint32_t>(src_.size()),
                          pos_ < toks_.size() ? toks_[pos_].begin
                                              : static_cast<std::uint32_t>(src_.size()));
    parse_items(b, true);
    if (!eof() && keyword(pos_, "end")) {
      t_.add_token(c, static_cast<int>(pos_++));
    } else {
      t_.node(b).error = true;
    }
    t_.fix_spans(c);
    if (c != s) {
      auto& n = t_.node(c);
      n.body = b;
      n.name = n.kind == NodeKind::kFunction ? def_name(c) : class_name(c);
      if (n.name.empty()) {
        n.anonymous = true;
        n.name = anonymous_name(t_, c);
      }
    }
  }
};

}  // namespace

void parse_ruby(SyntaxTree& tree) { RubyParser(tree).run(); }

}  // namespace forge::detail
