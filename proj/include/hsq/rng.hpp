#pragma once

#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

namespace hsq {

// SplitMix64. All randomness in the library flows through this generator so
// that a run is reproducible from a single seed, independent of platform and
// standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller on SplitMix uniforms.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 1e-300) u1 = next_double();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
  }

  // Derive an independent stream for a named sub-task.
  Rng split(std::string_view label) const {
    std::uint64_t h = state_ ^ 0xcbf29ce484222325ull;
    for (char c : label) h = (h ^ std::uint64_t(std::uint8_t(c))) * 0x100000001b3ull;
    return Rng(h);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Uniform point on the unit sphere of C^N.
inline std::vector<std::complex<double>> sphere_point(int N, Rng& rng) {
  std::vector<std::complex<double>> v(static_cast<std::size_t>(N));
  double nsq = 0.0;
  do {
    nsq = 0.0;
    for (auto& z : v) {
      z = {rng.next_gaussian(), rng.next_gaussian()};
      nsq += std::norm(z);
    }
  } while (nsq < 1e-12);
  const double inv = 1.0 / std::sqrt(nsq);
  for (auto& z : v) z *= inv;
  return v;
}

}  // namespace hsq
