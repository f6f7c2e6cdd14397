#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pragtune {

// FNV-1a 64-bit. Stable across platforms; used for design-point ids and the
// canned-response store keys.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

inline std::string content_hash(std::string_view data) { return hex64(fnv1a64(data)); }

}  // namespace pragtune
