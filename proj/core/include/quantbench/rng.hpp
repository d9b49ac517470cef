#pragma once

#include <cstdint>
#include <vector>

namespace quantbench {

// Deterministic 64-bit generator (splitmix64). Used everywhere instead of
// <random> so that seeded runs produce identical streams on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Stable mixing of several seed components into one stream seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  Rng r(a * 0x9e3779b97f4a7c15ULL ^ (b + 0x165667b19e3779f9ULL) ^ (c << 17));
  r.next_u64();
  return r.next_u64();
}

}  // namespace quantbench
