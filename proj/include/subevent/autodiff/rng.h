#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace subevent::ad {

// Seeded generator with named substreams. Split("embed") always yields the
// same sequence for the same parent seed, independent of how much the parent
// has been consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(Mix(seed)) {}

  std::uint64_t seed() const { return seed_; }
  Rng Split(std::string_view name) const;
  Rng Split(std::uint64_t index) const;

  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n);

  std::mt19937_64 &engine() { return engine_; }

  static std::uint64_t Mix(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace subevent::ad
