#pragma once

// Counter-based random number generation (Philox-4x32 with 10 rounds).
//
// Every random draw is a pure function of (seed, stream, block index), so
// pipelines can hand out independent streams to worker threads and still
// produce bit-identical results regardless of scheduling. The implementation
// follows the Philox definition of Salmon et al. and matches the published
// known-answer vectors (see tests).

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace rawkit {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
using PhiloxBlock = std::array<std::uint32_t, 4>;

// One Philox-4x32-10 block: 128 bits of counter, 64-bit key, 128 bits out.
PhiloxBlock philox4x32(const PhiloxCounter& counter, const PhiloxKey& key);

// A stream of draws addressed by block index. `uint64_at(i)` never advances
// internal state; the `next_*` helpers walk the counter sequentially.
class PhiloxStream {
 public:
  explicit PhiloxStream(std::uint64_t seed, std::uint64_t stream = 0);

  // Random-access draws (block `index` of this stream).
  std::uint64_t uint64_at(std::uint64_t index) const;
  double uniform01_at(std::uint64_t index) const;  // [0, 1)
  double gaussian_at(std::uint64_t index) const;   // standard normal, Box-Muller

  // Sequential draws.
  std::uint64_t next_uint64() { return uint64_at(counter_++); }
  double next_uniform01() { return uniform01_at(counter_++); }
  double next_gaussian() { return gaussian_at(counter_++); }
  double next_in(double lo, double hi);
  // Uniform in log space; returns `lo` exactly when the range is degenerate.
  double next_log_uniform(double lo, double hi);
  // Unbiased uniform integer in [0, n); rejection sampled.
  std::uint64_t next_below(std::uint64_t n);

 private:
  PhiloxBlock block_at(std::uint64_t index) const;

  PhiloxKey key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// Seeded Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& items, PhiloxStream& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

// FNV-1a over raw bytes; used to derive per-item seeds from stable ids.
std::uint64_t fnv1a64(std::string_view bytes);

// SplitMix64 finalizer; decorrelates (seed, salt) pairs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// Per-item seed: mix_seed(seed, fnv1a64(id)). Independent of processing order.
std::uint64_t seed_for_id(std::uint64_t seed, std::string_view id);

}  // namespace rawkit
