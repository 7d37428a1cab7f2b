#include "coinflip/rng.hpp"

namespace coinflip {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  // Largest multiple of n that fits; values at or above it are rejected.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  for (;;) {
    std::uint64_t x = next();
    if (x < limit) return x % n;
  }
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace coinflip
