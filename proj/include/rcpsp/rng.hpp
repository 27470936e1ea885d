#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace rcpsp {

// Deterministic random stream. All sampling goes through the hand-rolled
// helpers below instead of std distributions, whose output is
// implementation-defined; seeded runs must replay bit-identically.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform over [0, n). Lemire's multiply-with-rejection, bias-free.
  int index(int n) {
    assert(n > 0);
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    unsigned __int128 product = static_cast<unsigned __int128>(next()) * range;
    auto low = static_cast<std::uint64_t>(product);
    if (low < range) {
      const std::uint64_t threshold = (0 - range) % range;
      while (low < threshold) {
        product = static_cast<unsigned __int128>(next()) * range;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<int>(product >> 64);
  }

  // Uniform over [lo, hi], inclusive.
  int range(int lo, int hi) {
    assert(lo <= hi);
    return lo + index(hi - lo + 1);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (int i = static_cast<int>(values.size()) - 1; i > 0; --i) {
      std::swap(values[i], values[index(i + 1)]);
    }
  }

  // Moves a uniformly random k-subset, in uniformly random order, to the
  // front of `values` (partial Fisher-Yates).
  template <typename T>
  void shuffle_prefix(std::vector<T>& values, int k) {
    const int n = static_cast<int>(values.size());
    assert(0 <= k && k <= n);
    for (int i = 0; i < k; ++i) {
      std::swap(values[i], values[i + index(n - i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rcpsp
