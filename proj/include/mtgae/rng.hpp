#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace mtgae::nn {

/// Counter-based random stream. Draw number `c` of a stream is the SplitMix64
/// finalizer applied to `key + (c + 1) * golden`, so the sequence is fully
/// determined by (seed, counter) on every platform. Distributions are built
/// here rather than with <random> because the standard distributions are
/// implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t counter = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  /// Uniform integer in [0, bound). Unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t bound);

  /// Independent child stream; `fork(k)` is a pure function of (seed, k).
  RngStream fork(std::uint64_t stream_id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_;
};

std::uint64_t splitmix64_mix(std::uint64_t x);

/// Fisher-Yates shuffle driven by `rng`.
template <class T>
void shuffle(std::span<T> items, RngStream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace mtgae::nn
