#pragma once

#include <cstdint>
#include <random>

namespace coinflip {

// Seeded random stream used for every randomized choice in the library.
//
// Backed by std::mt19937_64, whose output sequence is fixed by the standard;
// bounded integers and doubles are derived here rather than through the
// <random> distributions (which are implementation-defined), so a given
// seed replays bit-exactly on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n), n >= 1. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);

  bool bit() { return (next() >> 63) != 0; }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Independent stream seed for (seed, index); splitmix64 finalizer.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index);

 private:
  std::mt19937_64 engine_;
};

}  // namespace coinflip
