#include <benchmark/benchmark.h>

#include <random>

#include "migtk/metrics.hpp"
#include "migtk/morphology.hpp"
#include "migtk/registration.hpp"
#include "migtk/sampler.hpp"
#include "migtk/tracking.hpp"

using namespace migtk;

namespace {

// Blobby cells: filled disks with a few radial arms.
LabelMask cells(int side, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pos(30, side - 31), radius(8, 20), arm(10, 28);
  LabelMask m(side, side, 0u);
  for (int k = 1; k <= count; ++k) {
    const int cr = pos(rng), cc = pos(rng), r = radius(rng);
    for (int y = cr - r; y <= cr + r; ++y)
      for (int x = cc - r; x <= cc + r; ++x)
        if ((y - cr) * (y - cr) + (x - cc) * (x - cc) <= r * r) m(y, x) = static_cast<std::uint32_t>(k);
    const int len = arm(rng);
    for (int s = r; s < r + len && cc + s < side; ++s) m(cr, cc + s) = static_cast<std::uint32_t>(k);
  }
  return m;
}

GrayFrame texture(int w, int h, int dy, int dx) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> v(0, 4095);
  const int margin = 16;
  Raster<std::uint16_t> scene(w + 2 * margin, h + 2 * margin);
  for (auto& p : scene.values()) p = static_cast<std::uint16_t>(v(rng));
  Raster<std::uint16_t> out(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) out(r, c) = scene(r + margin - dy, c + margin - dx);
  return GrayFrame(std::move(out), 16);
}

void BM_EuclideanDistance(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto mask = cells(side, side / 40, 1).foreground();
  for (auto _ : state) benchmark::DoNotOptimize(euclidean_distance_transform(mask));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mask.size()));
}
BENCHMARK(BM_EuclideanDistance)->Arg(256)->Arg(512)->Arg(985);

void BM_Skeletonize(benchmark::State& state) {
  const auto mask = cells(static_cast<int>(state.range(0)), 6, 2).foreground();
  for (auto _ : state) benchmark::DoNotOptimize(skeletonize(mask));
}
BENCHMARK(BM_Skeletonize)->Arg(256)->Arg(512);

void BM_DetectProtrusions(benchmark::State& state) {
  const auto mask = cells(static_cast<int>(state.range(0)), 12, 3);
  for (auto _ : state) benchmark::DoNotOptimize(detect_protrusions(mask));
}
BENCHMARK(BM_DetectProtrusions)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_EstimateShift(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto ref = texture(side, side, 0, 0);
  const auto mov = texture(side, side, 3, -4);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_shift(ref, mov, static_cast<int>(state.range(1))));
}
BENCHMARK(BM_EstimateShift)->Args({128, 5})->Args({256, 10})->Unit(benchmark::kMillisecond);

void BM_SegFrame(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto gt = cells(side, side / 20, 4);
  const auto res = cells(side, side / 20, 5);
  for (auto _ : state) benchmark::DoNotOptimize(seg_frame(gt, res));
}
BENCHMARK(BM_SegFrame)->Arg(256)->Arg(985);

void BM_SamplerDraw(benchmark::State& state) {
  const auto dist = build_sampling_distribution(cells(512, 10, 6).foreground());
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(draw_centroid(dist, rng));
}
BENCHMARK(BM_SamplerDraw);

void BM_LinkByOverlap(benchmark::State& state) {
  std::vector<LabelMask> video;
  for (int t = 0; t < 20; ++t) video.push_back(cells(256, 8, 7));
  for (auto _ : state) benchmark::DoNotOptimize(link_by_overlap(video));
}
BENCHMARK(BM_LinkByOverlap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
