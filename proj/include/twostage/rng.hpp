#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace twostage {

/// SplitMix64 finalizer. Used only to derive generator states from keys.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// xoshiro256++ 1.0. Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

/// Identifies one independent random stream. Every draw made by the simulator
/// comes from a generator keyed by (seed, replication, channel, attempt,
/// block), so the numbers consumed by replication r never depend on how
/// replications are scheduled across workers.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  std::uint32_t channel = 0;  // 0 = present survey, 1 = prior survey
  std::uint32_t attempt = 0;  // rejection-redraw index
  std::uint32_t block = 0;    // dyadic sample block

  std::uint64_t digest() const noexcept;
};

inline Xoshiro256pp make_generator(const StreamKey& key) noexcept { return Xoshiro256pp(key.digest()); }

/// Multinomial sampling by the conditional-binomial chain, arranged so that a
/// sample of size n is the union of dyadic blocks [0,64), [64,128),
/// [128,256), ... truncated at n. Block b is drawn from its own generator,
/// hence samples of different sizes with the same key share all complete
/// blocks. `tail` holds the suffix sums of the cell probabilities
/// (tail[k] = sum_{j >= k} p_j).
void draw_multinomial(std::int64_t size, std::span<const double> probs, std::span<const double> tail,
                      StreamKey key, std::span<std::int64_t> counts);

/// Suffix sums for draw_multinomial, accumulated in extended precision.
void probability_tails(std::span<const double> probs, std::span<double> tail);

}  // namespace twostage
