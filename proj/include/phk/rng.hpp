#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace phk {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seeded random stream. All randomness in the library flows through this
// class so that results are reproducible bit-for-bit for a given seed,
// independently of the platform's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), eng_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double u01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential() { return -std::log(u01()); }

  // Unbiased uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (-n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  int below_int(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  // Independent stream derived from the base seed; stream ids give
  // deterministic per-task generators for parallel work.
  Rng substream(std::uint64_t id) const {
    return Rng(splitmix64(seed_ + 0x9e3779b97f4a7c15ull * (id + 1)));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

}  // namespace phk
