#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bondlab {

// Stateless random numbers keyed by (seed, stream coordinates). The value
// at a coordinate never depends on evaluation order, so panels generate
// identically under any thread schedule.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t bits(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                     std::uint64_t d = 0) const noexcept {
    std::uint64_t h = mix(seed_ ^ 0x9e3779b97f4a7c15ULL);
    h = mix(h ^ (a * 0xbf58476d1ce4e5b9ULL));
    h = mix(h ^ (b * 0x94d049bb133111ebULL));
    h = mix(h ^ (c * 0xd6e8feb86659fd93ULL));
    return mix(h ^ (d + 0x632be59bd9b4e019ULL));
  }

  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                 std::uint64_t d = 0) const noexcept {
    return (static_cast<double>(bits(a, b, c, d) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on two uniforms at draws 2d and 2d+1.
  double normal(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                std::uint64_t d = 0) const noexcept {
    const double u1 = uniform(a, b, c, 2 * d);
    const double u2 = uniform(a, b, c, 2 * d + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace bondlab
