#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace forge::text {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

inline std::string_view rtrim(std::string_view s) {
  std::size_t e = s.size();
  while (e > 0 && is_space(s[e - 1])) --e;
  return s.substr(0, e);
}

inline std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

inline std::string join_lines(const std::vector<std::string>& lines,
                              std::size_t from = 0,
                              std::size_t to = static_cast<std::size_t>(-1)) {
  std::string out;
  to = std::min(to, lines.size());
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out += '\n';
    out += lines[i];
  }
  return out;
}

inline bool blank(std::string_view s) { return trim(s).empty(); }

inline std::size_t indent_of(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return i;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  return true;
}

// Removes the common indentation of all non-blank lines after the first,
// strips the first line's indentation, and drops blank edge lines.
inline std::string cleandoc(std::string_view s) {
  auto lines = split_lines(s);
  for (auto& l : lines) l = std::string(rtrim(l));
  std::size_t common = static_cast<std::size_t>(-1);
  for (std::size_t i = 1; i < lines.size(); ++i)
    if (!blank(lines[i])) common = std::min(common, indent_of(lines[i]));
  if (!lines.empty()) lines[0] = std::string(trim(lines[0]));
  if (common != static_cast<std::size_t>(-1))
    for (std::size_t i = 1; i < lines.size(); ++i)
      lines[i] = lines[i].size() >= common ? lines[i].substr(common) : std::string();
  while (!lines.empty() && lines.front().empty()) lines.erase(lines.begin());
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return join_lines(lines);
}

// Collapses runs of whitespace into single spaces and trims.
inline std::string squash(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

}  // namespace forge::text
