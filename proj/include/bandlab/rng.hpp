#pragma once

#include <array>
#include <cstdint>

namespace bandlab {

// Philox4x32-10 block function.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter apply(Counter ctr, Key key) noexcept;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Child seed for stream `stream` of a run seeded with `seed`.
std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Uniform on the odd multiples of 2^-53 in (0, 1), from two 32-bit words.
double openUniform(std::uint32_t hi, std::uint32_t lo) noexcept;

// Random access into the Philox stream keyed by a 64-bit seed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept;

  Philox4x32::Counter block(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                            std::uint32_t c3 = 0) const noexcept;
  // Two uniforms in (0,1) for counter (c0, c1, c2).
  std::array<double, 2> uniforms(std::uint32_t c0, std::uint32_t c1,
                                 std::uint32_t c2) const noexcept;

  Philox4x32::Key key() const noexcept { return key_; }

 private:
  Philox4x32::Key key_;
};

// Sequential generator over one Philox stream. Satisfies
// UniformRandomBitGenerator so it can drive <random> distributions.
class StreamRng {
 public:
  using result_type = std::uint32_t;

  explicit StreamRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }
  result_type operator()() noexcept;

  double uniform() noexcept;  // (0, 1)
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  CounterRng rng_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Philox4x32::Counter buf_{};
  int used_ = 4;
  bool haveSpare_ = false;
  double spare_ = 0;
};

}  // namespace bandlab
