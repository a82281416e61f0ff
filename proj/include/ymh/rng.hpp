#pragma once
// Reproducible random numbers. std::uniform_real_distribution is
// implementation-defined, so draws are mapped from raw mt19937_64 output
// directly: identical streams on every platform/compiler.

#include <cstdint>
#include <random>

namespace ymh {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }
  // Uniform in [-1, 1).
  double symmetric() { return 2.0 * uniform() - 1.0; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ymh
