// Deterministic, platform-independent random streams.
//
// Every random decision in the library is derived from one master seed
// through a tree of named sub-streams (component tag, block id, trial
// index, ...), so results are reproducible regardless of call order or
// threading.
#pragma once

#include <cstdint>
#include <string_view>

namespace tput {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(s);
}

}  // namespace detail

/// Derives a child seed from a parent seed and an integer tag.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  return detail::mix(parent, tag);
}

/// Derives a child seed from a parent seed and a string tag.
inline std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return detail::mix(parent, h);
}

template <class... Tags>
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag, Tags... rest) {
  return derive_seed(derive_seed(parent, tag), rest...);
}

template <class... Tags>
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, Tags... rest) {
  return derive_seed(derive_seed(parent, tag), rest...);
}

/// Small counter-free PRNG (splitmix64 chain). Not cryptographic; the
/// point is identical output on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling keeps the distribution exact
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace tput
