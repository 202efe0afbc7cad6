#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "forge/language.hpp"

namespace forge {

enum class TokenKind : std::uint8_t {
  kWord,          // identifiers and keywords
  kNumber,
  kString,        // string, char, regex and %-literals, heredocs
  kPunct,
  kLineComment,
  kBlockComment,
  kPreproc,       // C-family directive line(s), incl. skipped #else branches
  kInlineHtml,    // PHP text outside <?php ... ?>
  kNewline,
  kError,
};

struct Token {
  TokenKind kind;
  std::uint32_t begin;
  std::uint32_t end;
  std::uint32_t line;  // 1-based
  std::uint32_t col;   // 0-based byte column

  std::string_view text(std::string_view src) const {
    return src.substr(begin, end - begin);
  }
  bool is_comment() const {
    return kind == TokenKind::kLineComment || kind == TokenKind::kBlockComment;
  }
  // Tokens that count as code leaves.
  bool is_code() const {
    return kind != TokenKind::kNewline && !is_comment() &&
           kind != TokenKind::kInlineHtml;
  }
};

struct LexResult {
  std::vector<Token> tokens;
  std::size_t error_bytes = 0;
  // An unterminated construct swallowed the rest of the input.
  bool runaway = false;
};

LexResult lex(std::string_view src, LanguageId lang);

}  // namespace forge
