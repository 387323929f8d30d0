#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace agtd {

// Stateless splitmix64: golden-ratio increment followed by the published
// three-step avalanche mixer. Normative for watermark green-list membership
// and for all subsystem seed derivation, so keep it bit-exact.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Derives an independent child seed from a master seed and up to two
// stream indices. Used so that every parallel cell (pair, stream x fraction,
// grid cell) sees its own reproducible RNG.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b = 0) {
  return splitmix64(splitmix64(base ^ splitmix64(a)) ^ splitmix64(~b));
}

/// Hex-encoded SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

/// Hex-encoded SHA-256 of a file's contents. Throws if the file cannot be read.
std::string sha256_file_hex(const std::string& path);

}  // namespace agtd
