#pragma once

#include <cstdint>
#include <random>

namespace cvscramble {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for (seed, index). Results never depend on which worker
// draws the stream.
inline Rng stream_rng(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t a = splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  std::uint64_t b = splitmix64(a);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

// Counter-style generator: every (seed, a, b, c) key gives its own short
// stream. Used so that a gate's randomness depends only on where it sits in
// the circuit, not on the order in which gates are simulated.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static SplitMix64 keyed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ a);
    k = splitmix64(k ^ (b + 0x9e3779b97f4a7c15ULL));
    k = splitmix64(k ^ (c + 0x3c6ef372fe94f82aULL));
    return SplitMix64(k);
  }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return ((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace cvscramble
