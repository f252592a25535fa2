#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ruleke {

// mt19937_64 with hand-rolled bounded draws. std::uniform_int_distribution is
// implementation-defined, so sequences here stay stable across standard
// libraries for a given seed.
class Rng {
public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next() { return gen_(); }

  // Uniform in [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(xs.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& xs) {
    for (size_t i = xs.size(); i > 1; --i) {
      size_t j = below(i);
      std::swap(xs[i - 1], xs[j]);
    }
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace ruleke
