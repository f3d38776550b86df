#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gridhop/model.hpp"

namespace gridhop {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent substream id for (seed, a, b). Used to key per-trial and
// per-receiver generators so results do not depend on work scheduling.
inline uint64_t substream(uint64_t seed, uint64_t a, uint64_t b) {
  uint64_t x = splitmix64(seed ^ 0x6a09e667f3bcc909ull);
  x = splitmix64(x + 0x9e3779b97f4a7c15ull * (a + 1));
  x = splitmix64(x + 0xbf58476d1ce4e5b9ull * (b + 1));
  return x;
}

class Rng {
 public:
  explicit Rng(uint64_t stream) : eng_(stream) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // uniform integer in [0, n)
  int below(int n) {
    return static_cast<int>(uniform() * static_cast<double>(n));
  }

  // circularly-symmetric complex normal with E|z|^2 = sigma^2
  cplx complex_gaussian(double sigma) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double amp = sigma * std::sqrt(-std::log1p(-u1));
    const double ph = 6.283185307179586 * u2;
    return {amp * std::cos(ph), amp * std::sin(ph)};
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace gridhop
