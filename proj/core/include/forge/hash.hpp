#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace forge {

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

// splitmix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// Seeded hash of a string, stable across platforms and runs.
inline std::uint64_t seeded_hash(std::string_view s, std::uint64_t seed) {
  return hash_combine(mix64(seed), fnv1a64(s));
}

using Rng = std::mt19937_64;

// Unbiased draw from [0, bound). std::uniform_int_distribution is
// implementation-defined, so reproducible outputs need this instead.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

// Uniform real in [0, 1) built from the top 53 bits of one engine draw.
double uniform_unit(Rng& rng);

template <typename RandomIt>
void seeded_shuffle(RandomIt first, RandomIt last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniform_below(rng, i);
    std::iter_swap(first + (i - 1), first + j);
  }
}

}  // namespace forge
