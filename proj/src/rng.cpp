#include "sitr/rng.hpp"

#include <cmath>

#include "sitr/errors.hpp"

namespace sitr {

static std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() { return splitmix64_next(state_); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

float Rng::uniform_f(float lo, float hi) {
  return static_cast<float>(uniform(lo, hi));
}

std::int64_t Rng::below(std::int64_t n) {
  if (n <= 0) throw contract_error("Rng::below requires n > 0");
  // Lemire multiplicative range reduction; bias is < 2^-64 per draw and the
  // mapping is fully deterministic.
  unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * static_cast<std::uint64_t>(n);
  return static_cast<std::int64_t>(wide >> 64);
}

double Rng::normal() {
  double u1 = uniform();
  double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::trunc_normal(double stddev, double bound) {
  for (;;) {
    double x = normal() * stddev;
    if (std::fabs(x) <= bound * stddev) return x;
  }
}

std::uint64_t Rng::mix(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t p : parts) {
    h ^= p;
    splitmix64_next(h);
    h = splitmix64_next(h);
  }
  return h;
}

std::uint64_t Rng::hash_str(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void shuffle_indices(std::int64_t* idx, std::int64_t n, Rng& rng) {
  for (std::int64_t i = n - 1; i > 0; --i) {
    std::int64_t j = rng.below(i + 1);
    std::int64_t tmp = idx[i];
    idx[i] = idx[j];
    idx[j] = tmp;
  }
}

}  // namespace sitr
