#pragma once

#include <cstdint>
#include <random>

namespace quasix {

// Seedable, splittable generator around std::mt19937_64. Child streams are
// derived deterministically from the base seed via SplitMix64, so parallel
// chains get reproducible, non-overlapping seeds. Uniform variates are
// produced from raw engine output rather than std::uniform_*_distribution,
// whose streams are not pinned down by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on {0, ..., n-1}, unbiased via rejection on a bit mask.
  std::size_t next_index(std::size_t n) {
    if (n <= 1) return 0;
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    while (true) {
      const std::uint64_t draw = next_u64() & mask;
      if (draw < n) return static_cast<std::size_t>(draw);
    }
  }

  // Fair coin: +1 or -1.
  int next_sign() { return (next_u64() & 1ull) ? 1 : -1; }

  // Independent stream number `stream` derived from the base seed.
  Rng child(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ + (stream + 1) * 0x9e3779b97f4a7c15ull));
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace quasix
