#include "forge/lexer.hpp"

#include <array>
#include <cctype>
#include <cstring>
#include <string>

namespace forge {
namespace {

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c >= 0x80;
}
bool is_ident_char(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

// Operator table; the longest match wins.
constexpr std::array<std::string_view, 45> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "...", "===", "!==", "<=>", "**=", "?\?=",
    "->",   "=>",  "::",  "==",  "!=",  "<=",  ">=",  "&&",  "||",  "++",
    "--",   "+=",  "-=",  "*=",  "/=",  "%=",  "&=",  "|=",  "^=",  "**",
    "<<",   ">>",  "??",  "?.",  ":=",  "..",  "<-",  "&^",  "//",  "..=",
    "->*",  ".*",  "@@",  "||=", "&&=",
};

bool c_family(LanguageId l) {
  return l == LanguageId::kC || l == LanguageId::kCpp ||
         l == LanguageId::kCSharp;
}

class Lexer {
 public:
  Lexer(std::string_view src, LanguageId lang) : s_(src), lang_(lang) {}

 private:
  unsigned char at(std::size_t k) const {
    return k < s_.size() ? static_cast<unsigned char>(s_[k]) : 0;
  }
  bool starts(std::string_view lit, std::size_t k) const {
    return s_.compare(k, lit.size(), lit) == 0;
  }
  bool starts(std::string_view lit) const { return starts(lit, i_); }

  void emit(TokenKind kind, std::size_t begin, std::size_t end) {
    Token t{kind, static_cast<std::uint32_t>(begin),
            static_cast<std::uint32_t>(end), line_at_begin_,
            static_cast<std::uint32_t>(begin - line_start_at_begin_)};
    if (kind == TokenKind::kError) out_.error_bytes += end - begin;
    out_.tokens.push_back(t);
    if (kind != TokenKind::kNewline && !t.is_comment()) last_sig_ = t;
    has_last_sig_ = has_last_sig_ || (kind != TokenKind::kNewline && !t.is_comment());
  }

  // Advances i_ to `to`, keeping the line bookkeeping current.
  void advance_to(std::size_t to) {
    for (; i_ < to && i_ < s_.size(); ++i_) {
      if (s_[i_] == '\n') {
        ++line_;
        line_start_ = i_ + 1;
        at_line_start_ = true;
      }
    }
  }

  void mark() {
    line_at_begin_ = line_;
    line_start_at_begin_ = line_start_;
  }

  std::string_view last_text() const {
    return has_last_sig_ ? last_sig_.text(s_) : std::string_view{};
  }

  bool prev_is_value() const {
    if (!has_last_sig_) return false;
    switch (last_sig_.kind) {
      case TokenKind::kNumber:
      case TokenKind::kString:
        return true;
      case TokenKind::kWord: {
        static constexpr std::array<std::string_view, 20> kw = {
            "return", "typeof", "case",  "do",     "else", "in",    "of",
            "new",    "delete", "void",  "throw",  "instanceof", "yield",
            "await",  "if",     "unless", "when",  "and",  "or",    "not"};
        for (auto k : kw)
          if (last_sig_.text(s_) == k) return false;
        return true;
      }
      case TokenKind::kPunct: {
        auto t = last_sig_.text(s_);
        return t == ")" || t == "]" || t == "}";
      }
      default:
        return false;
    }
  }

  void step() {
    const auto c = at(i_);
    const bool line_start = at_line_start_;
    mark();
    if (c == '\n') {
      emit(TokenKind::kNewline, i_, i_ + 1);
      advance_to(i_ + 1);
      return;
    }
    if (is_space(c)) {
      ++i_;
      return;
    }
    at_line_start_ = false;

    if (lang_ == LanguageId::kPython && c == '\\' && at(i_ + 1) == '\n') {
      advance_to(i_ + 2);
      return;
    }
    if (lang_ == LanguageId::kRuby && line_start && starts("=begin") &&
        (i_ + 6 >= s_.size() || !is_ident_char(at(i_ + 6)))) {
      lex_ruby_block_comment();
      return;
    }
    if (c_family(lang_) && c == '#' && line_start) {
      lex_preproc();
      return;
    }
    if (lang_ == LanguageId::kPhp && starts("?>")) {
      emit(TokenKind::kPunct, i_, i_ + 2);
      advance_to(i_ + 2);
      php_html_ = true;
      return;
    }
    // Comments.
    if (has_hash_comments() && c == '#' &&
        !(lang_ == LanguageId::kRust)) {
      if (!(lang_ == LanguageId::kPhp && at(i_ + 1) == '[')) {
        lex_line_comment();
        return;
      }
    }
    if (has_slash_comments() && c == '/' && at(i_ + 1) == '/') {
      lex_line_comment();
      return;
    }
    if (has_slash_comments() && c == '/' && at(i_ + 1) == '*') {
      lex_block_comment();
      return;
    }
    // Strings and literals.
    if (try_string()) return;
    if (is_digit(c) || (c == '.' && is_digit(at(i_ + 1)))) {
      lex_number();
      return;
    }
    if (try_word()) return;
    if ((lang_ == LanguageId::kJavaScript || lang_ == LanguageId::kRuby) &&
        c == '/' && !prev_is_value() && try_regex())
      return;
    if (lang_ == LanguageId::kRuby && c == '%' && !prev_is_value() &&
        try_percent_literal())
      return;
    if (lang_ == LanguageId::kRuby && c == ':' && at(i_ + 1) != ':' &&
        (is_ident_start(at(i_ + 1)) || at(i_ + 1) == '"') &&
        !(i_ > 0 && (is_ident_char(at(i_ - 1)) || at(i_ - 1) == ':'))) {
      lex_ruby_symbol();
      return;
    }
    if (lang_ == LanguageId::kRuby && c == '<' && at(i_ + 1) == '<' &&
        try_heredoc())
      return;
    if (lang_ == LanguageId::kPhp && c == '<' && starts("<<<") &&
        try_php_heredoc())
      return;
    lex_punct();
  }

  bool has_hash_comments() const {
    return lang_ == LanguageId::kPython || lang_ == LanguageId::kRuby ||
           lang_ == LanguageId::kPhp;
  }
  bool has_slash_comments() const {
    return lang_ != LanguageId::kPython && lang_ != LanguageId::kRuby;
  }

  void lex_line_comment() {
    std::size_t j = i_;
    while (j < s_.size() && s_[j] != '\n') {
      if (lang_ == LanguageId::kPhp && s_.compare(j, 2, "?>") == 0) break;
      ++j;
    }
    // Drop a trailing '\r' from the comment span.
    std::size_t end = j;
    if (end > i_ && s_[end - 1] == '\r') --end;
    emit(TokenKind::kLineComment, i_, end);
    advance_to(j);
  }

  void lex_block_comment() {
    const auto close = s_.find("*/", i_ + 2);
    if (close == std::string_view::npos) {
      emit(TokenKind::kError, i_, s_.size());
      out_.runaway = true;
      advance_to(s_.size());
      return;
    }
    emit(TokenKind::kBlockComment, i_, close + 2);
    advance_to(close + 2);
  }

  void lex_ruby_block_comment() {
    std::size_t j = i_;
    while (true) {
      auto nl = s_.find('\n', j);
      if (nl == std::string_view::npos) {
        emit(TokenKind::kError, i_, s_.size());
        out_.runaway = true;
        advance_to(s_.size());
        return;
      }
      j = nl + 1;
      if (s_.compare(j, 4, "=end") == 0) {
        auto end = s_.find('\n', j);
        if (end == std::string_view::npos) end = s_.size();
        emit(TokenKind::kBlockComment, i_, end);
        advance_to(end);
        return;
      }
    }
  }

  void lex_preproc() {
    // Directive text up to an unescaped newline.
    auto directive_end = [&](std::size_t from) {
      std::size_t j = from;
      while (j < s_.size()) {
        if (s_[j] == '\n' && !(j > from && s_[j - 1] == '\\')) break;
        if (s_[j] == '/' && j + 1 < s_.size() && s_[j + 1] == '*') {
          auto close = s_.find("*/", j + 2);
          j = close == std::string_view::npos ? s_.size() : close + 2;
          continue;
        }
        ++j;
      }
      return j;
    };
    auto directive_name = [&](std::size_t from) {
      std::size_t j = from + 1;
      while (j < s_.size() && is_space(at(j))) ++j;
      std::size_t k = j;
      while (k < s_.size() && is_ident_char(at(k))) ++k;
      return s_.substr(j, k - j);
    };
    auto directive_arg = [&](std::size_t from, std::size_t end) {
      std::size_t j = from + 1;
      while (j < end && is_space(at(j))) ++j;
      while (j < end && is_ident_char(at(j))) ++j;
      auto arg = s_.substr(j, end - j);
      while (!arg.empty() && is_space(static_cast<unsigned char>(arg.front())))
        arg.remove_prefix(1);
      while (!arg.empty() && (is_space(static_cast<unsigned char>(arg.back())) ||
                              arg.back() == '\r'))
        arg.remove_suffix(1);
      return arg;
    };

    const auto name = directive_name(i_);
    std::size_t end = directive_end(i_);
    if (name == "if" || name == "ifdef" || name == "ifndef") {
      const bool taken = !(name == "if" && directive_arg(i_, end) == "0");
      cond_stack_.push_back(taken);
      if (!taken) end = skip_branch(end, /*to_endif=*/false);
    } else if (name == "elif" || name == "else") {
      if (!cond_stack_.empty() && cond_stack_.back()) {
        end = skip_branch(end, /*to_endif=*/true);
        cond_stack_.pop_back();
      } else if (!cond_stack_.empty()) {
        cond_stack_.back() = true;
      }
    } else if (name == "endif") {
      if (!cond_stack_.empty()) cond_stack_.pop_back();
    }
    emit(TokenKind::kPreproc, i_, end);
    advance_to(end);
  }

  // Skips lines until the matching #else/#elif (or #endif when to_endif) at
  // the current nesting level. Returns the end of the directive that stopped
  // the skip; an #endif that stops the skip also pops the condition.
  std::size_t skip_branch(std::size_t from, bool to_endif) {
    int depth = 0;
    std::size_t j = from;
    while (j < s_.size()) {
      auto nl = s_.find('\n', j);
      if (nl == std::string_view::npos) return s_.size();
      j = nl + 1;
      std::size_t k = j;
      while (k < s_.size() && is_space(at(k))) ++k;
      if (at(k) != '#') continue;
      std::size_t n = k + 1;
      while (n < s_.size() && is_space(at(n))) ++n;
      std::size_t m = n;
      while (m < s_.size() && is_ident_char(at(m))) ++m;
      auto word = s_.substr(n, m - n);
      auto line_end = s_.find('\n', k);
      if (line_end == std::string_view::npos) line_end = s_.size();
      if (word == "if" || word == "ifdef" || word == "ifndef") {
        ++depth;
      } else if (word == "endif") {
        if (depth == 0) {
          if (!to_endif && !cond_stack_.empty()) cond_stack_.pop_back();
          return line_end;
        }
        --depth;
      } else if ((word == "else" || word == "elif") && depth == 0 &&
                 !to_endif) {
        cond_stack_.back() = true;
        return line_end;
      }
    }
    return s_.size();
  }

  // Consumes a quoted body starting after the opening delimiter at `j`.
  // Returns the index one past the closing delimiter, or npos.
  std::size_t quoted_end(std::size_t j, char quote, bool escapes,
                         bool multiline, bool interpolation) const {
    while (j < s_.size()) {
      const char ch = s_[j];
      if (escapes && ch == '\\') {
        j += 2;
        continue;
      }
      if (ch == quote) return j + 1;
      if (ch == '\n' && !multiline) return std::string_view::npos;
      if (interpolation && ((ch == '$' && quote == '`') || ch == '#') &&
          j + 1 < s_.size() && s_[j + 1] == '{') {
        j = skip_braces(j + 1);
        continue;
      }
      ++j;
    }
    return std::string_view::npos;
  }

  // From an opening '{' at j, returns index after its matching '}'.
  std::size_t skip_braces(std::size_t j) const {
    int depth = 0;
    while (j < s_.size()) {
      const char ch = s_[j];
      if (ch == '{') ++depth;
      if (ch == '}' && --depth == 0) return j + 1;
      if (ch == '"' || ch == '\'') {
        auto e = quoted_end(j + 1, ch, true, false, false);
        if (e != std::string_view::npos) {
          j = e;
          continue;
        }
      }
      ++j;
    }
    return s_.size();
  }

  void finish_string(std::size_t begin, std::size_t end, bool multiline_ok) {
    if (end == std::string_view::npos) {
      if (multiline_ok) {
        emit(TokenKind::kError, begin, s_.size());
        out_.runaway = true;
        advance_to(s_.size());
      } else {
        auto nl = s_.find('\n', begin);
        if (nl == std::string_view::npos) nl = s_.size();
        emit(TokenKind::kError, begin, nl);
        advance_to(nl);
      }
      return;
    }
    emit(TokenKind::kString, begin, end);
    advance_to(end);
  }

  bool try_string() {
    const auto c = at(i_);
    switch (lang_) {
      case LanguageId::kPython: {
        std::size_t j = i_;
        while (j < i_ + 2 && std::strchr("rRbBuUfF", at(j)) && at(j) != 0) ++j;
        if (at(j) != '"' && at(j) != '\'') return false;
        const bool raw = s_.substr(i_, j - i_).find_first_of("rR") !=
                         std::string_view::npos;
        const char q = static_cast<char>(at(j));
        if (at(j + 1) == q && at(j + 2) == q) {
          const std::string triple(3, q);
          std::size_t k = j + 3;
          std::size_t end = std::string_view::npos;
          while (k < s_.size()) {
            if (!raw && s_[k] == '\\') {
              k += 2;
              continue;
            }
            if (s_.compare(k, 3, triple) == 0) {
              end = k + 3;
              break;
            }
            ++k;
          }
          finish_string(i_, end, true);
          return true;
        }
        finish_string(i_, quoted_end(j + 1, q, true, false, false), false);
        return true;
      }
      case LanguageId::kJavaScript:
        if (c == '`') {
          finish_string(i_, quoted_end(i_ + 1, '`', true, true, true), true);
          return true;
        }
        if (c == '"' || c == '\'') {
          finish_string(i_, quoted_end(i_ + 1, c, true, false, false), false);
          return true;
        }
        return false;
      case LanguageId::kGo:
        if (c == '`') {
          auto close = s_.find('`', i_ + 1);
          finish_string(i_, close == std::string_view::npos ? close : close + 1,
                        true);
          return true;
        }
        if (c == '"' || c == '\'') {
          finish_string(i_, quoted_end(i_ + 1, c, true, false, false), false);
          return true;
        }
        return false;
      case LanguageId::kRust:
        return try_rust_string();
      case LanguageId::kCSharp:
        if (c == '@' && at(i_ + 1) == '"') {
          finish_string(i_, verbatim_end(i_ + 2), true);
          return true;
        }
        if (c == '$' && (at(i_ + 1) == '"' || at(i_ + 1) == '@')) {
          if (at(i_ + 1) == '@' && at(i_ + 2) == '"') {
            finish_string(i_, verbatim_end(i_ + 3), true);
          } else if (at(i_ + 1) == '"') {
            finish_string(i_, quoted_end(i_ + 2, '"', true, false, false),
                          false);
          } else {
            return false;
          }
          return true;
        }
        [[fallthrough]];
      case LanguageId::kJava:
        if (c == '"' && at(i_ + 1) == '"' && at(i_ + 2) == '"') {
          auto close = s_.find("\"\"\"", i_ + 3);
          finish_string(i_, close == std::string_view::npos ? close : close + 3,
                        true);
          return true;
        }
        [[fallthrough]];
      case LanguageId::kC:
        if (c == '"' || c == '\'') {
          finish_string(i_, quoted_end(i_ + 1, c, true, false, false), false);
          return true;
        }
        return false;
      case LanguageId::kCpp: {
        std::size_t j = i_;
        if (starts("u8", j)) j += 2;
        else if (c == 'u' || c == 'U' || c == 'L') j += 1;
        if (at(j) == 'R' && at(j + 1) == '"') {
          auto paren = s_.find('(', j + 2);
          if (paren == std::string_view::npos || paren - (j + 2) > 16)
            return false;
          std::string closing = ")";
          closing.append(s_.substr(j + 2, paren - (j + 2)));
          closing += '"';
          auto close = s_.find(closing, paren + 1);
          finish_string(i_,
                        close == std::string_view::npos
                            ? close
                            : close + closing.size(),
                        true);
          return true;
        }
        if (at(j) == '"' || at(j) == '\'') {
          finish_string(i_, quoted_end(j + 1, static_cast<char>(at(j)), true,
                                       false, false),
                        false);
          return true;
        }
        return false;
      }
      case LanguageId::kPhp:
        if (c == '"' || c == '\'') {
          finish_string(i_, quoted_end(i_ + 1, c, true, true, false), true);
          return true;
        }
        if (c == '`') {
          finish_string(i_, quoted_end(i_ + 1, '`', true, true, false), true);
          return true;
        }
        return false;
      case LanguageId::kRuby:
        if (c == '"' || c == '`') {
          finish_string(i_, quoted_end(i_ + 1, c, true, true, true), true);
          return true;
        }
        if (c == '\'') {
          finish_string(i_, quoted_end(i_ + 1, c, true, true, false), true);
          return true;
        }
        return false;
    }
    return false;
  }

  std::size_t verbatim_end(std::size_t j) const {
    while (j < s_.size()) {
      if (s_[j] == '"') {
        if (at(j + 1) == '"') {
          j += 2;
          continue;
        }
        return j + 1;
      }
      ++j;
    }
    return std::string_view::npos;
  }

  bool try_rust_string() {
    const auto c = at(i_);
    std::size_t j = i_;
    if (c == 'b' && (at(j + 1) == '"' || at(j + 1) == '\'' || at(j + 1) == 'r'))
      ++j;
    if (at(j) == 'r' && (at(j + 1) == '"' || at(j + 1) == '#')) {
      std::size_t k = j + 1;
      std::size_t hashes = 0;
      while (at(k) == '#') {
        ++hashes;
        ++k;
      }
      if (at(k) != '"') return false;
      std::string closing = "\"" + std::string(hashes, '#');
      auto close = s_.find(closing, k + 1);
      finish_string(i_,
                    close == std::string_view::npos ? close
                                                    : close + closing.size(),
                    true);
      return true;
    }
    if (at(j) == '"') {
      finish_string(i_, quoted_end(j + 1, '"', true, true, false), true);
      return true;
    }
    if (at(j) == '\'') {
      // Char literal vs lifetime: 'a' / '\n' / '\u{..}' are chars.
      if (at(j + 1) == '\\') {
        auto close = s_.find('\'', j + 2);
        finish_string(i_, close == std::string_view::npos ? close : close + 1,
                      false);
        return true;
      }
      // One UTF-8 character followed by a quote.
      std::size_t k = j + 1;
      if (k < s_.size()) {
        ++k;
        while (k < s_.size() && (at(k) & 0xC0) == 0x80) ++k;
      }
      if (at(k) == '\'') {
        emit(TokenKind::kString, i_, k + 1);
        advance_to(k + 1);
        return true;
      }
      if (is_ident_start(at(j + 1))) {
        // Lifetime or label.
        std::size_t m = j + 1;
        while (m < s_.size() && is_ident_char(at(m))) ++m;
        emit(TokenKind::kWord, i_, m);
        advance_to(m);
        return true;
      }
    }
    return false;
  }

  void lex_number() {
    std::size_t j = i_;
    const bool hex = at(j) == '0' && (at(j + 1) == 'x' || at(j + 1) == 'X');
    while (j < s_.size()) {
      const auto ch = at(j);
      if (is_ident_char(ch) && ch < 0x80) {
        if (!hex && (ch == 'e' || ch == 'E') &&
            (at(j + 1) == '+' || at(j + 1) == '-') && is_digit(at(j + 2))) {
          j += 2;
          continue;
        }
        ++j;
        continue;
      }
      if (ch == '.' && at(j + 1) != '.' && !is_ident_start(at(j + 1))) {
        ++j;
        continue;
      }
      if (ch == '.' && is_digit(at(j + 1))) {
        ++j;
        continue;
      }
      if (ch == '\'' && lang_ == LanguageId::kCpp && is_digit(at(j + 1))) {
        ++j;  // digit separator
        continue;
      }
      break;
    }
    emit(TokenKind::kNumber, i_, j);
    advance_to(j);
  }

  static bool is_replacement_char(std::string_view s, std::size_t j) {
    return s.compare(j, 3, "\xEF\xBF\xBD") == 0;
  }

  bool try_word() {
    std::size_t j = i_;
    const auto c = at(j);
    if (lang_ == LanguageId::kPhp && c == '$' && is_ident_start(at(j + 1))) {
      ++j;
    } else if (lang_ == LanguageId::kRuby && (c == '@' || c == '$')) {
      ++j;
      if (at(j) == '@') ++j;
      if (!is_ident_start(at(j))) return false;
    } else if (lang_ == LanguageId::kCSharp && c == '@' &&
               is_ident_start(at(j + 1))) {
      ++j;
    } else if (lang_ == LanguageId::kJavaScript && c == '$') {
      // '$' is an identifier character in JS.
    } else if (!is_ident_start(c)) {
      return false;
    }
    if (is_replacement_char(s_, j)) return false;
    while (j < s_.size()) {
      const auto ch = at(j);
      if (ch >= 0x80 && is_replacement_char(s_, j)) break;
      if (is_ident_char(ch) || (lang_ == LanguageId::kJavaScript && ch == '$')) {
        ++j;
        continue;
      }
      break;
    }
    if (lang_ == LanguageId::kRuby && (at(j) == '?' || at(j) == '!') &&
        at(j + 1) != '=' && at(j + 1) != ':')
      ++j;
    emit(TokenKind::kWord, i_, j);
    advance_to(j);
    return true;
  }

  bool try_regex() {
    std::size_t j = i_ + 1;
    if (at(j) == ' ' && lang_ == LanguageId::kRuby) return false;
    if (at(j) == '*' || at(j) == '/') return false;
    bool in_class = false;
    while (j < s_.size()) {
      const char ch = s_[j];
      if (ch == '\n') return false;
      if (ch == '\\') {
        j += 2;
        continue;
      }
      if (ch == '[') in_class = true;
      if (ch == ']') in_class = false;
      if (ch == '/' && !in_class) break;
      ++j;
    }
    if (j >= s_.size()) return false;
    ++j;
    while (j < s_.size() && std::isalpha(at(j))) ++j;
    emit(TokenKind::kString, i_, j);
    advance_to(j);
    return true;
  }

  bool try_percent_literal() {
    std::size_t j = i_ + 1;
    if (std::strchr("wWiIqQrsx", at(j)) && at(j) != 0) ++j;
    const auto open = at(j);
    char close;
    switch (open) {
      case '(': close = ')'; break;
      case '[': close = ']'; break;
      case '{': close = '}'; break;
      case '<': close = '>'; break;
      case '|': close = '|'; break;
      case '!': close = '!'; break;
      case '/': close = '/'; break;
      default: return false;
    }
    int depth = 1;
    std::size_t k = j + 1;
    while (k < s_.size()) {
      const char ch = s_[k];
      if (ch == '\\') {
        k += 2;
        continue;
      }
      if (ch == close && --depth == 0) break;
      if (ch == static_cast<char>(open) && open != static_cast<unsigned char>(close)) ++depth;
      ++k;
    }
    if (k >= s_.size()) {
      finish_string(i_, std::string_view::npos, true);
      return true;
    }
    ++k;
    while (k < s_.size() && std::isalpha(at(k))) ++k;
    emit(TokenKind::kString, i_, k);
    advance_to(k);
    return true;
  }

  void lex_ruby_symbol() {
    std::size_t j = i_ + 1;
    if (at(j) == '"') {
      finish_string(i_, quoted_end(j + 1, '"', true, false, true), false);
      return;
    }
    while (j < s_.size() && is_ident_char(at(j))) ++j;
    if (at(j) == '?' || at(j) == '!' || at(j) == '=') {
      if (at(j + 1) != '=' && at(j + 1) != '>') ++j;
    }
    emit(TokenKind::kString, i_, j);
    advance_to(j);
  }

  bool try_heredoc() {
    std::size_t j = i_ + 2;
    bool squiggly = false;
    if (at(j) == '~' || at(j) == '-') {
      squiggly = true;
      ++j;
    }
    char quote = 0;
    if (at(j) == '\'' || at(j) == '"') quote = static_cast<char>(at(j++));
    std::size_t k = j;
    while (k < s_.size() && is_ident_char(at(k))) ++k;
    if (k == j) return false;
    const auto id = s_.substr(j, k - j);
    if (!squiggly && !quote && !(id[0] >= 'A' && id[0] <= 'Z')) return false;
    if (!squiggly && prev_is_value() && last_sig_.kind != TokenKind::kWord)
      return false;
    if (quote) {
      if (at(k) != static_cast<unsigned char>(quote)) return false;
      ++k;
    }
    // Body starts on the next line and ends at a line equal to the id.
    auto nl = s_.find('\n', k);
    if (nl == std::string_view::npos) return false;
    std::size_t line = nl + 1;
    while (line < s_.size()) {
      auto eol = s_.find('\n', line);
      if (eol == std::string_view::npos) eol = s_.size();
      auto text = s_.substr(line, eol - line);
      while (!text.empty() && is_space(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
      while (!text.empty() && (text.back() == '\r' || text.back() == ' '))
        text.remove_suffix(1);
      if (text == id) {
        // Token covers the opener; the body is emitted separately so the
        // rest of the opener line still lexes normally.
        emit(TokenKind::kString, i_, k);
        pending_heredocs_.push_back({nl + 1, eol});
        advance_to(k);
        return true;
      }
      line = eol + 1;
    }
    return false;
  }

  bool try_php_heredoc() {
    std::size_t j = i_ + 3;
    while (is_space(at(j))) ++j;
    char quote = 0;
    if (at(j) == '\'' || at(j) == '"') quote = static_cast<char>(at(j++));
    std::size_t k = j;
    while (k < s_.size() && is_ident_char(at(k))) ++k;
    if (k == j) return false;
    const auto id = s_.substr(j, k - j);
    if (quote) ++k;
    auto line = s_.find('\n', k);
    while (line != std::string_view::npos) {
      std::size_t p = line + 1;
      while (p < s_.size() && is_space(at(p))) ++p;
      if (s_.compare(p, id.size(), id) == 0 && !is_ident_char(at(p + id.size()))) {
        const auto end = p + id.size();
        emit(TokenKind::kString, i_, end);
        advance_to(end);
        return true;
      }
      line = s_.find('\n', line + 1);
    }
    finish_string(i_, std::string_view::npos, true);
    return true;
  }

  void lex_punct() {
    const auto c = at(i_);
    if (c >= 0x80 || c < 0x20 || c == 0x7f) {
      // Replacement characters, stray control bytes.
      std::size_t j = i_ + 1;
      while (j < s_.size() && (at(j) & 0xC0) == 0x80) ++j;
      emit(TokenKind::kError, i_, j);
      advance_to(j);
      return;
    }
    std::string_view best;
    for (auto op : kOperators) {
      if (op.size() <= best.size() || !starts(op)) continue;
      if (op == "//" && lang_ != LanguageId::kPython) continue;
      best = op;
    }
    if (!best.empty()) {
      emit(TokenKind::kPunct, i_, i_ + best.size());
      advance_to(i_ + best.size());
      return;
    }
    if (std::strchr("(){}[];,.:?~!+-*/%&|^<>=@#$\\`'\"", c)) {
      // A lone quote or backslash here means an unterminated/stray literal.
      const bool stray = c == '\\' || c == '`' || c == '\'' || c == '"';
      emit(stray ? TokenKind::kError : TokenKind::kPunct, i_, i_ + 1);
      advance_to(i_ + 1);
      return;
    }
    emit(TokenKind::kError, i_, i_ + 1);
    advance_to(i_ + 1);
  }

  void lex_php_html() {
    auto open = s_.find("<?", i_);
    if (open == std::string_view::npos) {
      mark();
      if (i_ < s_.size()) emit(TokenKind::kInlineHtml, i_, s_.size());
      advance_to(s_.size());
      return;
    }
    if (open > i_) {
      mark();
      emit(TokenKind::kInlineHtml, i_, open);
      advance_to(open);
    }
    mark();
    std::size_t end = open + 2;
    if (s_.compare(open, 5, "<?php") == 0) end = open + 5;
    else if (s_.compare(open, 3, "<?=") == 0) end = open + 3;
    emit(TokenKind::kPunct, open, end);
    advance_to(end);
    php_html_ = false;
  }

  std::string_view s_;
  LanguageId lang_;
  std::size_t i_ = 0;
  std::uint32_t line_ = 1;
  std::size_t line_start_ = 0;
  std::uint32_t line_at_begin_ = 1;
  std::size_t line_start_at_begin_ = 0;
  bool at_line_start_ = true;
  bool php_html_ = false;
  Token last_sig_{};
  bool has_last_sig_ = false;
  std::vector<bool> cond_stack_;
  struct Span {
    std::size_t begin, end;
  };
  std::vector<Span> pending_heredocs_;
  LexResult out_;

 public:
  // Heredoc bodies are skipped when the lexer reaches them.
  LexResult run_with_heredocs() {
    if (lang_ == LanguageId::kPhp) php_html_ = true;
    while (i_ < s_.size()) {
      if (php_html_) {
        lex_php_html();
        continue;
      }
      if (!pending_heredocs_.empty() && s_[i_] == '\n') {
        // Newline ending the opener line, then the bodies.
        mark();
        emit(TokenKind::kNewline, i_, i_ + 1);
        advance_to(i_ + 1);
        for (auto& h : pending_heredocs_) {
          if (h.begin < i_) continue;
          mark();
          emit(TokenKind::kString, h.begin, h.end);
          advance_to(h.end);
        }
        pending_heredocs_.clear();
        continue;
      }
      step();
    }
    return std::move(out_);
  }
};

}  // namespace

LexResult lex(std::string_view src, LanguageId lang) {
  Lexer lexer(src, lang);
  return lexer.run_with_heredocs();
}

}  // namespace forge
