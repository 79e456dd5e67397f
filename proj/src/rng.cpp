#include "bandlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace bandlab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline Philox4x32::Counter round(Philox4x32::Counter c, Philox4x32::Key k) noexcept {
  const std::uint64_t p0 = std::uint64_t(kMul0) * c[0];
  const std::uint64_t p1 = std::uint64_t(kMul1) * c[2];
  return {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
          std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) noexcept {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    ctr = round(ctr, key);
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

double openUniform(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (std::uint64_t(hi >> 6) << 26) | (lo >> 6);
  return double(2 * bits + 1) * 0x1.0p-53;
}

CounterRng::CounterRng(std::uint64_t seed) noexcept
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)} {}

Philox4x32::Counter CounterRng::block(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                                      std::uint32_t c3) const noexcept {
  return Philox4x32::apply({c0, c1, c2, c3}, key_);
}

std::array<double, 2> CounterRng::uniforms(std::uint32_t c0, std::uint32_t c1,
                                           std::uint32_t c2) const noexcept {
  const auto b = block(c0, c1, c2);
  return {openUniform(b[0], b[1]), openUniform(b[2], b[3])};
}

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : rng_(seed), stream_(stream) {}

StreamRng::result_type StreamRng::operator()() noexcept {
  if (used_ == 4) {
    buf_ = rng_.block(std::uint32_t(counter_), std::uint32_t(counter_ >> 32),
                      std::uint32_t(stream_), std::uint32_t(stream_ >> 32));
    ++counter_;
    used_ = 0;
  }
  return buf_[used_++];
}

double StreamRng::uniform() noexcept {
  const std::uint32_t hi = (*this)();
  const std::uint32_t lo = (*this)();
  return openUniform(hi, lo);
}

double StreamRng::normal() noexcept {
  if (haveSpare_) {
    haveSpare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  haveSpare_ = true;
  return r * std::cos(th);
}

std::uint64_t StreamRng::below(std::uint64_t n) noexcept {
  if (n <= 1) return 0;
  // Rejection on 64-bit draws to avoid modulo bias.
  const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
  for (;;) {
    const std::uint64_t hi = (*this)();
    const std::uint64_t x = (hi << 32) | (*this)();
    if (x < limit) return x % n;
  }
}

}  // namespace bandlab
