#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace sitr {

// Deterministic pseudo-random stream built on splitmix64. All randomness in
// the project flows through this type so that results are bit-reproducible
// across platforms; std::<random> distributions are deliberately avoided.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 bits of mantissa.
  double uniform();
  double uniform(double lo, double hi);
  float uniform_f(float lo, float hi);

  // Uniform integer in [0, n); n must be positive.
  std::int64_t below(std::int64_t n);

  // Standard normal via Box-Muller; consumes exactly two raw draws.
  double normal();

  // Normal with the given stddev, redrawn until |x| <= bound * stddev.
  double trunc_normal(double stddev, double bound = 2.0);

  // Derives a child seed from labeled parts; order-sensitive.
  static std::uint64_t mix(std::initializer_list<std::uint64_t> parts);

  // FNV-1a, for folding string identifiers into seeds.
  static std::uint64_t hash_str(std::string_view s);

 private:
  std::uint64_t state_;
};

// In-place Fisher-Yates shuffle over indices [0, n) stored in `idx`.
void shuffle_indices(std::int64_t* idx, std::int64_t n, Rng& rng);

}  // namespace sitr
