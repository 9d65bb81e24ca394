#pragma once

// Counter-based random streams.
//
// A SeedStream is a Philox4x32-10 generator whose key is derived from a
// master seed and whose upper counter words hold a stream index, so
// streams with different indices never overlap. Experiments key one
// stream per trial on (seed, trial), which makes results independent of
// how trials are partitioned across workers.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace betafreeze {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class SeedStream {
 public:
  using result_type = std::uint64_t;

  explicit SeedStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : stream_(stream) {
    const std::uint64_t k = splitmix64(seed);
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (pos_ >= 4) refill();
    const std::uint64_t lo = buffer_[pos_++];
    const std::uint64_t hi = buffer_[pos_++];
    return (hi << 32) | lo;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by Box-Muller; consumes exactly two uniforms per pair.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Child stream keyed on this stream's key and `index`.
  SeedStream split(std::uint64_t index) const noexcept {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(key_[1]) << 32) | key_[0];
    return SeedStream(splitmix64(key ^ splitmix64(stream_)), index);
  }

 private:
  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
  }

  void refill() noexcept {
    std::array<std::uint32_t, 4> c = {
        static_cast<std::uint32_t>(counter_),
        static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32)};
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c[0], hi0, lo0);
      mulhilo(0xCD9E8D57u, c[2], hi1, lo1);
      c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    buffer_ = c;
    pos_ = 0;
    ++counter_;
  }

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace betafreeze
