#pragma once

#include <cstdint>
#include <string_view>

namespace mvsvm {

// Minimal UTF-8 decoding, enough to walk codepoints in tweet text.
// Malformed bytes decode as U+FFFD with length 1 so scanning always advances.
inline uint32_t utf8_decode(std::string_view s, size_t pos, size_t* len) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    *len = 1;
    return b0;
  }
  int n = 0;
  uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    n = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    n = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    n = 3;
    cp = b0 & 0x07;
  } else {
    *len = 1;
    return 0xFFFD;
  }
  if (pos + static_cast<size_t>(n) >= s.size()) {
    *len = 1;
    return 0xFFFD;
  }
  for (int i = 1; i <= n; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      *len = 1;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  *len = static_cast<size_t>(n) + 1;
  return cp;
}

inline size_t utf8_length(std::string_view s) {
  size_t n = 0;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t len;
    utf8_decode(s, pos, &len);
    pos += len;
    ++n;
  }
  return n;
}

}  // namespace mvsvm
