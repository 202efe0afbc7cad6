#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "forge/language.hpp"

namespace forge {

struct CodeTokens {
  std::vector<std::string> tokens;
  bool fallback = false;  // lexing failed; whitespace+punctuation split used
};

// Leaf tokens of a code fragment, comments and whitespace excluded.
CodeTokens tokenize_code(std::string_view code, LanguageId language);

// Whitespace split, then every punctuation character on its own.
std::vector<std::string> fallback_tokenize(std::string_view code);

// Word/punctuation split for natural-language text. A word is a maximal run
// of letters, digits, '_' or non-ASCII bytes; every other non-space
// character is a token by itself.
std::vector<std::string> tokenize_text(std::string_view text);

}  // namespace forge
