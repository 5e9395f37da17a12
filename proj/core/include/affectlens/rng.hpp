#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace affectlens {

// mt19937_64 core with hand-rolled draws. The engine itself is fully
// specified by the standard; the std::uniform_* distributions are not,
// so rolling them here keeps seeded runs identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53 bits of mantissa.
  double next_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n), n >= 1. Rejection keeps it unbiased.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x % n;
  }

  // Fisher-Yates, descending index.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace affectlens
