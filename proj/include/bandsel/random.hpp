#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace bandsel {

// Seeded generator with distribution code that is fully specified here, so
// draws are identical across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  // Uniform real in [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// k distinct values from [0, n), uniformly without replacement, returned in
// ascending order (Floyd's algorithm). Requires k <= n.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    Rng& rng);

}  // namespace bandsel
