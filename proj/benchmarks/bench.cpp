// Microbenchmarks for the hot paths: demosaic, noise synthesis, whole-image
// unprocessing, dataset slicing and detection evaluation.

#include <benchmark/benchmark.h>

#include <vector>

#include "rawkit/datapipe.hpp"
#include "rawkit/isp.hpp"
#include "rawkit/metrics.hpp"
#include "rawkit/profiles.hpp"
#include "rawkit/rng.hpp"
#include "rawkit/types.hpp"
#include "rawkit/unprocess.hpp"

using namespace rawkit;

namespace {

BayerPlane random_plane(int side) {
  PhiloxStream rng(7);
  BayerPlane plane;
  plane.width = side;
  plane.height = side;
  plane.values.resize(static_cast<std::size_t>(side) * side);
  for (auto& v : plane.values) v = static_cast<float>(rng.next_uniform01());
  return plane;
}

SRGBImage random_srgb(int side) {
  PhiloxStream rng(9);
  SRGBImage img = SRGBImage::zeros(side, side);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.next_below(256));
  return img;
}

void bm_demosaic(benchmark::State& state) {
  const BayerPlane plane = random_plane(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(isp::demosaic(plane));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(bm_demosaic)->Arg(256)->Arg(1024);

void bm_add_noise(benchmark::State& state) {
  const BayerPlane plane = random_plane(static_cast<int>(state.range(0)));
  const NoiseParams params{1e-3, 1e-4};
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(unprocess::add_noise(plane, params, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(bm_add_noise)->Arg(256)->Arg(1024);

void bm_unprocess_image(benchmark::State& state) {
  const SRGBImage srgb = random_srgb(static_cast<int>(state.range(0)));
  const CameraProfile& profile = builtin_profile_bank()[1];
  unprocess::AugmentSample aug;
  aug.target_brightness = 791.0;
  aug.noise = unprocess::noise_for_level(5.0);
  aug.wb_gains = {1.9, 1.0, 1.6};
  for (auto _ : state)
    benchmark::DoNotOptimize(unprocess::unprocess_image(srgb, profile, aug, 42));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(bm_unprocess_image)->Arg(128)->Arg(512);

void bm_slice_dataset(benchmark::State& state) {
  PhiloxStream rng(11);
  DatasetIndex index;
  index.categories.push_back({1, "object"});
  std::int64_t ann_id = 1;
  for (std::int64_t id = 1; id <= 8; ++id) {
    ImageRecord rec;
    rec.id = id;
    rec.file_path = "im" + std::to_string(id) + ".png";
    rec.width = 6000;
    rec.height = 4000;
    index.images.push_back(rec);
    for (int b = 0; b < 40; ++b) {
      BBox box;
      box.w = 40.0 + rng.next_uniform01() * 800.0;
      box.h = 40.0 + rng.next_uniform01() * 600.0;
      box.x = rng.next_uniform01() * (6000.0 - box.w);
      box.y = rng.next_uniform01() * (4000.0 - box.h);
      index.annotations.push_back({ann_id++, id, 1, box, false});
    }
  }
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(datapipe::slice_dataset(index, 1280, 300, 0.4, true, threads));
}
BENCHMARK(bm_slice_dataset)->Arg(1)->Arg(4);

void bm_evaluate(benchmark::State& state) {
  PhiloxStream rng(13);
  DatasetIndex index;
  std::vector<DetectionResult> dets;
  for (std::int64_t c = 1; c <= 3; ++c)
    index.categories.push_back({c, "cat" + std::to_string(c)});
  std::int64_t ann_id = 1;
  for (std::int64_t id = 1; id <= 20; ++id) {
    ImageRecord rec;
    rec.id = id;
    rec.file_path = "im" + std::to_string(id) + ".png";
    rec.width = 1000;
    rec.height = 1000;
    index.images.push_back(rec);
    for (int g = 0; g < 15; ++g) {
      BBox box;
      box.w = 20.0 + rng.next_uniform01() * 200.0;
      box.h = 20.0 + rng.next_uniform01() * 200.0;
      box.x = rng.next_uniform01() * (1000.0 - box.w);
      box.y = rng.next_uniform01() * (1000.0 - box.h);
      const auto cat = static_cast<std::int64_t>(1 + rng.next_below(3));
      index.annotations.push_back({ann_id++, id, cat, box, false});
      BBox jit = box;
      jit.x += (rng.next_uniform01() - 0.5) * 0.4 * box.w;
      jit.w *= 0.8 + rng.next_uniform01() * 0.4;
      dets.push_back({id, cat, jit, rng.next_uniform01()});
    }
  }
  const auto cfg = metrics::EvalConfig::for_setting(metrics::Setting::Sliced);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::evaluate(index, dets, cfg));
}
BENCHMARK(bm_evaluate);

}  // namespace

BENCHMARK_MAIN();
