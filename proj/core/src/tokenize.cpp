#include "forge/tokenize.hpp"

#include <cctype>

#include "forge/lexer.hpp"

namespace forge {
namespace {

bool word_byte(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize_text(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (word_byte(c)) {
      std::size_t j = i;
      while (j < text.size() && word_byte(static_cast<unsigned char>(text[j])))
        ++j;
      out.emplace_back(text.substr(i, j - i));
      i = j;
    } else {
      out.emplace_back(text.substr(i, 1));
      ++i;
    }
  }
  return out;
}

std::vector<std::string> fallback_tokenize(std::string_view code) {
  return tokenize_text(code);
}

CodeTokens tokenize_code(std::string_view code, LanguageId language) {
  CodeTokens out;
  std::string owned;
  std::string_view src = code;
  bool skip_open_tag = false;
  if (language == LanguageId::kPhp && code.find("<?") == std::string_view::npos) {
    owned = "<?php " + std::string(code);
    src = owned;
    skip_open_tag = true;
  }
  auto lexed = lex(src, language);
  bool bad = lexed.runaway;
  for (const auto& tk : lexed.tokens)
    if (tk.kind == TokenKind::kError) bad = true;
  if (bad) {
    out.tokens = fallback_tokenize(code);
    out.fallback = true;
    return out;
  }
  for (std::size_t i = skip_open_tag ? 1 : 0; i < lexed.tokens.size(); ++i) {
    const auto& tk = lexed.tokens[i];
    if (tk.is_code()) out.tokens.emplace_back(tk.text(src));
  }
  return out;
}

}  // namespace forge
