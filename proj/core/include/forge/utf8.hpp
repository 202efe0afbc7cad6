#pragma once

#include <string>
#include <string_view>

namespace forge {

struct DecodeResult {
  std::string text;
  std::size_t replaced = 0;  // invalid sequences replaced by U+FFFD
  bool binary = false;       // NUL bytes or mostly undecodable
};

// Lossy UTF-8 decoding: invalid sequences become U+FFFD. Inputs that look
// binary are flagged so callers can skip them.
DecodeResult decode_utf8_lossy(std::string_view bytes);

bool is_valid_utf8(std::string_view bytes);

}  // namespace forge
