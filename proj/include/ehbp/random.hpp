#pragma once

#include <cstdint>
#include <string_view>

namespace ehbp {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Counter-based random stream. A stream is identified by (master seed, label);
// the value at (t, sub) is a pure function of those, so any slot can be
// queried in any order and streams never interfere with each other.
//
//   stream_seed = mix64(master_seed ^ fnv1a64(label))
//   word(t, sub) = mix64(mix64(stream_seed ^ mix64(t)) + sub)
//   uniform(t, sub) = (word >> 11) * 2^-53
class RandomStream {
 public:
  RandomStream() = default;
  RandomStream(std::uint64_t master_seed, std::string_view label) : seed_(mix64(master_seed ^ fnv1a64(label))) {}

  std::uint64_t word(std::uint64_t t, std::uint64_t sub = 0) const { return mix64(mix64(seed_ ^ mix64(t)) + sub); }

  // Uniform on [0, 1).
  double uniform(std::uint64_t t, std::uint64_t sub = 0) const {
    return static_cast<double>(word(t, sub) >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_ = 0;
};

}  // namespace ehbp
