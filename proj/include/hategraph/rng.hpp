#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace hategraph {

// splitmix64 step; used to derive independent stream seeds.
inline uint64_t mix_seed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  return mix_seed(base ^ mix_seed(stream));
}

inline uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b) {
  return derive_seed(derive_seed(base, a), b);
}

// Deterministic RNG. The core is std::mt19937_64 (its sequence is pinned by
// the standard); all distributions are drawn by hand because the standard
// distribution adaptors are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [0, n) via rejection sampling.
  uint64_t uniform_below(uint64_t n) {
    if (n == 0) return 0;
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  // Uniform double in [0, 1).
  double uniform_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1]; never zero, safe inside log().
  double uniform_double_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Box-Muller, both variates kept.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform_double_pos();
    double u2 = uniform_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace hategraph
