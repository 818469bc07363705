#include "rawkit/rng.hpp"

#include <cmath>
#include <numbers>

#include "rawkit/error.hpp"

namespace rawkit {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;  // golden ratio
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;  // sqrt(3) - 1

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline std::uint64_t join64(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// 53-bit mantissa draw in [0, 1).
inline double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

// Strictly positive draw in (0, 1]; safe under log().
inline double to_unit_positive(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

PhiloxBlock philox4x32(const PhiloxCounter& counter, const PhiloxKey& key) {
  PhiloxCounter c = counter;
  PhiloxKey k = key;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kPhiloxW0;
      k[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo32(kPhiloxM0, c[0], hi0, lo0);
    mulhilo32(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

PhiloxStream::PhiloxStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

PhiloxBlock PhiloxStream::block_at(std::uint64_t index) const {
  const PhiloxCounter counter = {
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  return philox4x32(counter, key_);
}

std::uint64_t PhiloxStream::uint64_at(std::uint64_t index) const {
  const PhiloxBlock b = block_at(index);
  return join64(b[1], b[0]);
}

double PhiloxStream::uniform01_at(std::uint64_t index) const {
  return to_unit(uint64_at(index));
}

double PhiloxStream::gaussian_at(std::uint64_t index) const {
  const PhiloxBlock b = block_at(index);
  const double u1 = to_unit_positive(join64(b[1], b[0]));
  const double u2 = to_unit(join64(b[3], b[2]));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double PhiloxStream::next_in(double lo, double hi) {
  if (lo > hi) throw ValidationError("next_in: empty range");
  if (lo == hi) return lo;
  return lo + next_uniform01() * (hi - lo);
}

double PhiloxStream::next_log_uniform(double lo, double hi) {
  if (!(lo > 0.0) || lo > hi) throw ValidationError("next_log_uniform: range must satisfy 0 < lo <= hi");
  if (lo == hi) return lo;
  return std::exp(next_in(std::log(lo), std::log(hi)));
}

std::uint64_t PhiloxStream::next_below(std::uint64_t n) {
  if (n == 0) throw ValidationError("next_below: n must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_uint64();
  } while (x >= limit);
  return x % n;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed ^ salt;
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t seed_for_id(std::uint64_t seed, std::string_view id) {
  return mix_seed(seed, fnv1a64(id));
}

}  // namespace rawkit
