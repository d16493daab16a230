#pragma once

// Counter-based random streams.
//
// A RandomStream is an immutable (master_seed, substream_index) descriptor.
// Draw k of a stream is a pure function of (seed, substream, k), so work can be
// partitioned over substreams and executed on any number of threads without
// changing a single bit of output.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace rdl {

// Philox4x32-10 (Salmon et al., Random123).
struct Philox4x32 {
  using counter_type = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  static constexpr counter_type apply(counter_type ctr, key_type key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Generator;

class RandomStream {
 public:
  constexpr RandomStream(std::uint64_t master_seed, std::uint64_t substream_index) noexcept
      : seed_(master_seed), substream_(substream_index) {}

  constexpr std::uint64_t master_seed() const noexcept { return seed_; }
  constexpr std::uint64_t substream_index() const noexcept { return substream_; }

  /// Child stream for sub-task `k`; distinct (substream, k) pairs give distinct children.
  constexpr RandomStream split(std::uint64_t k) const noexcept {
    return RandomStream(seed_, splitmix64(substream_ ^ splitmix64(k + 0x632BE59BD9B4E019ull)));
  }

  /// Raw 64-bit draw number `draw_index`, independent of any generator state.
  constexpr std::uint64_t bits(std::uint64_t draw_index) const noexcept {
    const auto out = block(draw_index >> 1);
    return (draw_index & 1u) ? (std::uint64_t{out[2]} << 32 | out[3])
                             : (std::uint64_t{out[0]} << 32 | out[1]);
  }

  /// Uniform double in the open interval (0, 1).
  constexpr double uniform(std::uint64_t draw_index) const noexcept {
    return to_open_unit(bits(draw_index));
  }

  Generator generator() const noexcept;

  static constexpr double to_open_unit(std::uint64_t b) noexcept {
    return (static_cast<double>(b >> 12) + 0.5) * 0x1.0p-52;
  }

  constexpr Philox4x32::counter_type block(std::uint64_t block_index) const noexcept {
    return Philox4x32::apply(
        {static_cast<std::uint32_t>(block_index), static_cast<std::uint32_t>(block_index >> 32),
         static_cast<std::uint32_t>(substream_), static_cast<std::uint32_t>(substream_ >> 32)},
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  }

  friend constexpr bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  std::uint64_t seed_;
  std::uint64_t substream_;
};

/// Sequential cursor over a RandomStream. Draw i of the cursor is stream.bits(i).
class Generator {
 public:
  using result_type = std::uint64_t;

  explicit Generator(RandomStream stream) noexcept : stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    if ((next_ & 1u) == 0) cache_ = stream_.block(next_ >> 1);
    const bool high = (next_ & 1u) != 0;
    ++next_;
    return high ? (std::uint64_t{cache_[2]} << 32 | cache_[3])
                : (std::uint64_t{cache_[0]} << 32 | cache_[1]);
  }

  double uniform() noexcept { return RandomStream::to_open_unit((*this)()); }

  /// Standard normal via Box-Muller; both variates of a pair are used.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t draws_consumed() const noexcept { return next_; }
  const RandomStream& stream() const noexcept { return stream_; }

 private:
  RandomStream stream_;
  std::uint64_t next_ = 0;
  Philox4x32::counter_type cache_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline Generator RandomStream::generator() const noexcept { return Generator(*this); }

}  // namespace rdl
