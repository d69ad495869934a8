#pragma once

#include <cstdint>

namespace ratchet {

/// Stateless keyed generator: the draw for (stream, counter) depends only on
/// the seed and those two integers, so any schedule of parallel trials sees
/// the same numbers. Mixing is the splitmix64 finalizer applied twice.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const noexcept {
    std::uint64_t x = mix(seed_ ^ mix(stream + 0x9e3779b97f4a7c15ULL));
    return mix(x ^ (counter * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace ratchet
