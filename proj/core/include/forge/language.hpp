#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace forge {

// The closed set of languages the pipeline understands.
enum class LanguageId {
  kPython,
  kJava,
  kJavaScript,
  kPhp,
  kC,
  kCpp,
  kCSharp,
  kGo,
  kRuby,
  kRust,
};

inline constexpr std::array<LanguageId, 10> kAllLanguages = {
    LanguageId::kPython, LanguageId::kJava, LanguageId::kJavaScript,
    LanguageId::kPhp,    LanguageId::kC,    LanguageId::kCpp,
    LanguageId::kCSharp, LanguageId::kGo,   LanguageId::kRuby,
    LanguageId::kRust,
};

using LanguageSet = std::set<LanguageId>;

// Canonical lower-case name used in every serialized record ("python",
// "cpp", "c_sharp", ...).
std::string_view language_name(LanguageId lang);

// Accepts canonical names plus a few common aliases ("c++", "c#", "js").
std::optional<LanguageId> parse_language(std::string_view name);

// Extension-based detection; unknown extensions are rejected, never guessed.
// `.h` maps to C.
std::optional<LanguageId> detect_language(std::string_view rel_path);

// Parses a comma-separated list; throws ConfigError on unknown names.
LanguageSet parse_language_list(std::string_view csv);

}  // namespace forge
