#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "rawkit/rng.hpp"

using namespace rawkit;

// Known-answer vectors from the Random123 reference implementation
// (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
TEST_CASE("philox4x32-10 matches the published vectors") {
  {
    const PhiloxBlock out = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    const PhiloxBlock out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }
  {
    // counter and key from the hex digits of pi
    const PhiloxBlock out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                       {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("random access draws never disturb sequential state") {
  PhiloxStream a(1234, 7);
  PhiloxStream b(1234, 7);

  const std::uint64_t first = a.next_uint64();
  const std::uint64_t second = a.next_uint64();
  (void)b.uint64_at(905);  // random access on b, any index
  CHECK(b.next_uint64() == first);
  CHECK(b.uint64_at(1) == second);
  CHECK(b.next_uint64() == second);
}

TEST_CASE("streams with different ids or seeds disagree") {
  PhiloxStream a(42, 0);
  PhiloxStream b(42, 1);
  PhiloxStream c(43, 0);
  CHECK(a.uint64_at(0) != b.uint64_at(0));
  CHECK(a.uint64_at(0) != c.uint64_at(0));

  // same coordinates always reproduce
  CHECK(a.uint64_at(5) == PhiloxStream(42, 0).uint64_at(5));
}

TEST_CASE("uniform01 lies in [0, 1) and fills the range") {
  PhiloxStream rng(99);
  double lo = 1.0;
  double hi = 0.0;
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo < 0.001);
  CHECK(hi > 0.999);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("gaussian draws have standard moments") {
  PhiloxStream rng(2024);
  const int n = 1000000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gaussian();
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 5e-3);
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("next_below is exact at the boundaries and roughly uniform") {
  PhiloxStream rng(7);
  CHECK(rng.next_below(1) == 0);

  std::map<std::uint64_t, int> counts;
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[rng.next_below(6)];
  CHECK(counts.size() == 6);
  for (const auto& [value, count] : counts) {
    CHECK(value < 6);
    CHECK(count > n / 6 - 600);
    CHECK(count < n / 6 + 600);
  }
}

TEST_CASE("shuffle produces unbiased permutations") {
  // all 6 permutations of 3 elements should appear ~1/6 of the time
  std::map<std::vector<int>, int> counts;
  PhiloxStream rng(31337);
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    std::vector<int> v = {0, 1, 2};
    shuffle(v, rng);
    ++counts[v];
  }
  CHECK(counts.size() == 6);
  for (const auto& [perm, count] : counts) {
    CHECK(count > n / 6 - 700);
    CHECK(count < n / 6 + 700);
  }
}

TEST_CASE("shuffle with a fixed seed is reproducible") {
  std::vector<int> a(50);
  std::vector<int> b(50);
  for (int i = 0; i < 50; ++i) a[i] = b[i] = i;
  PhiloxStream r1(5, 2);
  PhiloxStream r2(5, 2);
  shuffle(a, r1);
  shuffle(b, r2);
  CHECK(a == b);
  std::sort(a.begin(), a.end());
  for (int i = 0; i < 50; ++i) CHECK(a[i] == i);  // still a permutation
}

// FNV-1a test vectors from the reference specification by Fowler/Noll/Vo.
TEST_CASE("fnv1a64 matches the published vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

// mix_seed(0, 0) equals the first output of SplitMix64 seeded with 0,
// a widely published reference value.
TEST_CASE("mix_seed matches the splitmix64 finalizer") {
  CHECK(mix_seed(0, 0) == 0xe220a8397b1dcdafull);
  CHECK(mix_seed(1, 0) == mix_seed(0, 1));  // only seed^salt enters the mix
  CHECK(mix_seed(1, 2) != mix_seed(2, 4));
}

TEST_CASE("per-id seeds are stable and well spread") {
  const std::uint64_t s1 = seed_for_id(10, "img_0001.png");
  CHECK(s1 == seed_for_id(10, "img_0001.png"));
  CHECK(s1 != seed_for_id(10, "img_0002.png"));
  CHECK(s1 != seed_for_id(11, "img_0001.png"));
}

TEST_CASE("log-uniform draws stay inside the range and hit degenerate ranges") {
  PhiloxStream rng(77);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.next_log_uniform(80.0, 791.0);
    CHECK(v >= 80.0);
    CHECK(v <= 791.0);
  }
  CHECK(rng.next_log_uniform(3.5, 3.5) == 3.5);
}
