#include "forge/language.hpp"

#include <algorithm>
#include <cctype>

#include "forge/error.hpp"

namespace forge {

std::string_view language_name(LanguageId lang) {
  switch (lang) {
    case LanguageId::kPython: return "python";
    case LanguageId::kJava: return "java";
    case LanguageId::kJavaScript: return "javascript";
    case LanguageId::kPhp: return "php";
    case LanguageId::kC: return "c";
    case LanguageId::kCpp: return "cpp";
    case LanguageId::kCSharp: return "c_sharp";
    case LanguageId::kGo: return "go";
    case LanguageId::kRuby: return "ruby";
    case LanguageId::kRust: return "rust";
  }
  return "unknown";
}

std::optional<LanguageId> parse_language(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (auto lang : kAllLanguages) {
    if (language_name(lang) == lower) return lang;
  }
  if (lower == "py") return LanguageId::kPython;
  if (lower == "js") return LanguageId::kJavaScript;
  if (lower == "c++" || lower == "cxx") return LanguageId::kCpp;
  if (lower == "c#" || lower == "csharp" || lower == "cs")
    return LanguageId::kCSharp;
  if (lower == "golang") return LanguageId::kGo;
  if (lower == "rb") return LanguageId::kRuby;
  if (lower == "rs") return LanguageId::kRust;
  return std::nullopt;
}

std::optional<LanguageId> detect_language(std::string_view rel_path) {
  const auto slash = rel_path.find_last_of('/');
  const auto base =
      slash == std::string_view::npos ? rel_path : rel_path.substr(slash + 1);
  const auto dot = base.find_last_of('.');
  if (dot == std::string_view::npos || dot == 0) return std::nullopt;
  const auto ext = base.substr(dot + 1);
  if (ext == "py") return LanguageId::kPython;
  if (ext == "java") return LanguageId::kJava;
  if (ext == "js") return LanguageId::kJavaScript;
  if (ext == "php") return LanguageId::kPhp;
  if (ext == "c" || ext == "h") return LanguageId::kC;
  if (ext == "cpp" || ext == "cc" || ext == "hpp") return LanguageId::kCpp;
  if (ext == "cs") return LanguageId::kCSharp;
  if (ext == "go") return LanguageId::kGo;
  if (ext == "rb") return LanguageId::kRuby;
  if (ext == "rs") return LanguageId::kRust;
  return std::nullopt;
}

LanguageSet parse_language_list(std::string_view csv) {
  LanguageSet out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    auto comma = csv.find(',', pos);
    if (comma == std::string_view::npos) comma = csv.size();
    auto item = csv.substr(pos, comma - pos);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front())))
      item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back())))
      item.remove_suffix(1);
    if (!item.empty()) {
      auto lang = parse_language(item);
      if (!lang) throw ConfigError("unknown language '" + std::string(item) + "'");
      out.insert(*lang);
    }
    pos = comma + 1;
  }
  return out;
}

}  // namespace forge
