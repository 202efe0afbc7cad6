#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/language.hpp"

namespace forge {

enum class StyleId {
  kGoogle,
  kNumPy,
  kReST,
  kEpytext,
  kJavadoc,
  kJSDoc,
  kPHPDoc,
  kDoxygen,
  kXmlDoc,
  kYard,
  kRdoc,
  kUnstyled,
};

std::string_view style_name(StyleId style);
std::optional<StyleId> parse_style(std::string_view name);

struct ParamDoc {
  std::string name;
  std::optional<std::string> type_hint;
  std::string description;
};

struct ReturnDoc {
  std::optional<std::string> type_hint;
  std::string description;
};

struct RaiseDoc {
  std::string exception;
  std::string description;
};

struct DocstringMetadata {
  StyleId style = StyleId::kUnstyled;
  std::string description;
  std::string short_docstring;
  std::vector<ParamDoc> params;
  std::optional<ReturnDoc> returns;
  std::vector<RaiseDoc> raises;
  std::map<std::string, std::string> other_tags;

  // params + returns + raises.
  std::size_t attribute_count() const {
    return params.size() + (returns ? 1 : 0) + raises.size();
  }
};

// Styles tried for a language, in order.
std::vector<StyleId> style_priority(LanguageId language);

// Whether `docstring` follows the section grammar of `style`.
bool matches_style(std::string_view docstring, StyleId style);

// First style in the language's priority order that matches and parses
// without an "unparsed" section, else Unstyled.
// Expects comment delimiters to be stripped already.
StyleId detect_style(std::string_view docstring, LanguageId language);

DocstringMetadata parse_metadata(std::string_view docstring, StyleId style);

// The first sentence: text through the first '.', '!' or '?' that ends the
// text, precedes a blank line, or is followed by whitespace and an
// upper-case letter. Falls back to the first line. The dots of e.g., i.e.,
// etc., vs. and cf. are not terminators unless they end the text.
std::string short_docstring(std::string_view description);

}  // namespace forge
