#pragma once

#include <cstdint>
#include <string_view>

namespace sdv {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Derives an independent child seed from a parent seed and a numeric tag.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(seed ^ mix64(tag + 0x632BE59BD9B4E019ull));
}

/// FNV-1a over a label, for naming random streams.
constexpr std::uint64_t label_hash(std::string_view label) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
  return derive_seed(seed, label_hash(label));
}

/// Counter-based generator: the n-th draw of stream (seed, stream) is a pure
/// function of (seed, stream, n). Draws can be taken in any order, so
/// per-pixel noise does not depend on traversal order.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix64(seed ^ mix64(stream ^ 0xD1B54A32D192ED03ull))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * 0x9E3779B97F4A7C15ull);
  }

  /// Uniform in [0, 1).
  double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1].
  double uniform_open_closed(std::uint64_t counter) const noexcept {
    return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal draw (Box-Muller) keyed by a single counter.
  double normal(std::uint64_t n) const noexcept;

 private:
  std::uint64_t key_;
};

/// Sequential view over a CounterRng.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept : rng_(seed, stream) {}
  RandomStream(std::uint64_t seed, std::string_view label) noexcept
      : rng_(seed, label_hash(label)) {}

  std::uint64_t next_bits() noexcept { return rng_.bits(counter_++); }
  double uniform() noexcept { return rng_.uniform(counter_++); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept { return rng_.normal(counter_++); }
  double normal(double mean, double sigma) noexcept { return mean + sigma * normal(); }
  bool bernoulli(double p) noexcept { return uniform() < p; }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t index(std::uint64_t n) noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace sdv
