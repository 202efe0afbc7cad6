#include "forge/utf8.hpp"

namespace forge {
namespace {

// Length of the valid UTF-8 sequence starting at `i`, or 0 if invalid.
std::size_t valid_sequence(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return 1;
  std::size_t len;
  unsigned lo = 0x80, hi = 0xBF;
  if (b0 >= 0xC2 && b0 <= 0xDF) {
    len = 2;
  } else if (b0 >= 0xE0 && b0 <= 0xEF) {
    len = 3;
    if (b0 == 0xE0) lo = 0xA0;
    if (b0 == 0xED) hi = 0x9F;
  } else if (b0 >= 0xF0 && b0 <= 0xF4) {
    len = 4;
    if (b0 == 0xF0) lo = 0x90;
    if (b0 == 0xF4) hi = 0x8F;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    const unsigned l = k == 1 ? lo : 0x80, h = k == 1 ? hi : 0xBF;
    if (b < l || b > h) return 0;
  }
  return len;
}

}  // namespace

DecodeResult decode_utf8_lossy(std::string_view bytes) {
  DecodeResult out;
  out.text.reserve(bytes.size());
  std::size_t control = 0;
  for (std::size_t i = 0; i < bytes.size();) {
    const auto len = valid_sequence(bytes, i);
    if (len == 0) {
      out.text += "\xEF\xBF\xBD";
      ++out.replaced;
      ++i;
      continue;
    }
    const auto c = static_cast<unsigned char>(bytes[i]);
    if (c == 0) out.binary = true;
    if (len == 1 && c < 0x20 && c != '\n' && c != '\r' && c != '\t' &&
        c != '\f' && c != '\v')
      ++control;
    out.text.append(bytes.substr(i, len));
    i += len;
  }
  // More than 10% undecodable or control bytes: not source text.
  if (!bytes.empty() && (out.replaced + control) * 10 > bytes.size())
    out.binary = true;
  return out;
}

bool is_valid_utf8(std::string_view bytes) {
  for (std::size_t i = 0; i < bytes.size();) {
    const auto len = valid_sequence(bytes, i);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

}  // namespace forge
