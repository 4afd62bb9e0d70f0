#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

namespace driftkit {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::uint64_t value, std::uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(double value, std::uint64_t h = kFnvOffset) {
  return fnv1a64(std::bit_cast<std::uint64_t>(value), h);
}

std::string hex64(std::uint64_t h);

// FNV-1a over a file's raw bytes. Throws Error(Io) if unreadable.
std::uint64_t hash_file(const std::string& path);

}  // namespace driftkit
