#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace mudsim {

// One RNG engine everywhere so that a (seed, config) pair pins every drawn number.
using Rng = std::mt19937_64;

// splitmix64 finalizer; good avalanche, cheap, and stable across platforms.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_word(std::uint64_t w) noexcept { return mix64(w); }

inline std::uint64_t hash_word(double v) noexcept {
  return mix64(std::bit_cast<std::uint64_t>(v));
}

// FNV-1a for strings (experiment ids, stream tags).
inline std::uint64_t hash_word(std::string_view s) noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return mix64(h);
}

// Stable seed derivation: fold a base seed with an arbitrary list of context words
// (experiment id, axis value, run index, stream tag). Same inputs -> same seed,
// independent of platform and of evaluation order elsewhere.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = mix64(base ^ 0x6d756473696dULL);  // project tag, avoids seed 0 fixpoints
  for (std::uint64_t w : words) h = mix64(h ^ w);
  return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace mudsim
