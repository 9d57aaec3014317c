#include "twostage/rng.hpp"

#include <algorithm>
#include <boost/random/binomial_distribution.hpp>

namespace twostage {

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) noexcept {
  // SplitMix64 sequence started at `seed`.
  for (std::uint64_t k = 0; k < 4; ++k) state_[k] = mix64(seed + k * 0x9E3779B97F4A7C15ULL);
}

std::uint64_t StreamKey::digest() const noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ replication);
  h = mix64(h ^ ((static_cast<std::uint64_t>(channel) << 32) | attempt));
  h = mix64(h ^ block);
  return h;
}

void probability_tails(std::span<const double> probs, std::span<double> tail) {
  long double running = 0.0L;
  for (std::size_t k = probs.size(); k-- > 0;) {
    running += probs[k];
    tail[k] = static_cast<double>(running);
  }
}

namespace {

constexpr std::int64_t kFirstBlock = 64;

void draw_block(std::int64_t size, std::span<const double> probs, std::span<const double> tail,
                Xoshiro256pp& gen, std::span<std::int64_t> counts) {
  std::int64_t remaining = size;
  const std::size_t last = probs.size() - 1;
  for (std::size_t k = 0; k < last && remaining > 0; ++k) {
    const double p = std::clamp(probs[k] / tail[k], 0.0, 1.0);
    std::int64_t x = 0;
    if (p >= 1.0) {
      x = remaining;
    } else if (p > 0.0) {
      boost::random::binomial_distribution<std::int64_t, double> binomial(remaining, p);
      x = binomial(gen);
    }
    counts[k] += x;
    remaining -= x;
  }
  counts[last] += remaining;
}

}  // namespace

void draw_multinomial(std::int64_t size, std::span<const double> probs, std::span<const double> tail,
                      StreamKey key, std::span<std::int64_t> counts) {
  std::fill(counts.begin(), counts.end(), 0);
  std::int64_t start = 0;
  std::int64_t end = kFirstBlock;
  for (std::uint32_t block = 0; start < size; ++block) {
    key.block = block;
    Xoshiro256pp gen = make_generator(key);
    draw_block(std::min(end, size) - start, probs, tail, gen, counts);
    start = end;
    end *= 2;
  }
}

}  // namespace twostage
