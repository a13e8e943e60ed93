#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace arise::util {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

/// Stable content hash rendered as hex; used for fixture keys and caches.
inline std::string content_hash(std::string_view bytes) {
  return hex64(fnv1a64(bytes));
}

}  // namespace arise::util
