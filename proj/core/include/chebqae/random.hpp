// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <random>

namespace chebqae {

// SplitMix64 step; used to derive well-separated substream seeds from a
// master seed plus stream labels, so results are reproducible for any
// execution order or thread count.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent substream for (master, a, b), e.g. (seed, date k, node index).
[[nodiscard]] inline std::mt19937_64 substream(std::uint64_t master,
                                               std::uint64_t a,
                                               std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ (a + 0x9e3779b97f4a7c15ULL));
  s = splitmix64(s ^ (b + 0x7f4a7c159e3779b9ULL));
  return std::mt19937_64{s};
}

// Uniform double in [0,1) with 53 random bits. Explicit so that draws do not
// depend on the standard library's distribution implementation.
[[nodiscard]] inline double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; exact and portable.
[[nodiscard]] inline std::uint64_t uniform_below(std::mt19937_64& rng,
                                                 std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % n;
}

}  // namespace chebqae
