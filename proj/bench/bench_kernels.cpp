// Serial reference kernels against their OpenMP counterparts.
// Thread count is the benchmark argument for the parallel variants.

#include <benchmark/benchmark.h>

#include <random>

#include "panosynth/fusion.hpp"
#include "panosynth/parallel.hpp"
#include "panosynth/raster.hpp"
#include "panosynth/scene.hpp"
#include "panosynth/sweep.hpp"

using namespace panosynth;

namespace {

constexpr ImageDims kDims{512, 256};

struct Fixture {
  std::vector<io::Frame> frames;
  mesh::SphericalMesh mesh;
  raster::RasterConfig raster;
  ErpImage hole_image{kDims};
  VisibilityMask known{kDims};
  sweep::SweepConfig sweep;

  Fixture() {
    const auto s = scene::street_canyon();
    frames = scene::make_sequence(s, scene::start_pose(s), s.heading, 2.0, 2, kDims);
    mesh = mesh::build_mesh(frames[0].rgb, *frames[0].depth, {});
    raster.dims = kDims;
    // Real disocclusions make a realistic inpainting workload.
    const auto r = raster::render_mesh(mesh, frames[0].pose, frames[1].pose, raster);
    hole_image = r.color;
    known = r.mask();
    sweep.n_levels = 32;
  }
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

void threads_from(const benchmark::State& state) { set_thread_count(static_cast<int>(state.range(0))); }

void BM_MeshSerial(benchmark::State& state) {
  const auto& f = fx();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::render_mesh(f.mesh, f.frames[0].pose, f.frames[1].pose, f.raster));
  }
}

void BM_MeshParallel(benchmark::State& state) {
  const auto& f = fx();
  threads_from(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(raster::render_mesh(f.mesh, f.frames[0].pose, f.frames[1].pose, f.raster));
  }
}

void BM_PointsSerial(benchmark::State& state) {
  const auto& f = fx();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::render_points(f.frames[0].rgb, *f.frames[0].depth, f.frames[0].pose, f.frames[1].pose, f.raster));
  }
}

void BM_PointsParallel(benchmark::State& state) {
  const auto& f = fx();
  threads_from(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        raster::render_points(f.frames[0].rgb, *f.frames[0].depth, f.frames[0].pose, f.frames[1].pose, f.raster));
  }
}

void BM_InpaintSerial(benchmark::State& state) {
  const auto& f = fx();
  for (auto _ : state) benchmark::DoNotOptimize(reference::inpaint(f.hole_image, f.known, {}));
}

void BM_InpaintParallel(benchmark::State& state) {
  const auto& f = fx();
  threads_from(state);
  for (auto _ : state) benchmark::DoNotOptimize(fusion::inpaint(f.hole_image, f.known, {}));
}

void BM_CostVolumeSerial(benchmark::State& state) {
  const auto& f = fx();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::build_cost_volume(f.frames[0].rgb, f.frames[0].pose, f.frames[1].rgb, f.frames[1].pose, f.sweep));
  }
}

void BM_CostVolumeParallel(benchmark::State& state) {
  const auto& f = fx();
  threads_from(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sweep::build_cost_volume(f.frames[0].rgb, f.frames[0].pose, f.frames[1].rgb, f.frames[1].pose, f.sweep));
  }
}

void thread_args(benchmark::internal::Benchmark* b) {
  for (const int t : {1, 2, 4, 8}) b->Arg(t);
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_MeshSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeshParallel)->Apply(thread_args);
BENCHMARK(BM_PointsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PointsParallel)->Apply(thread_args);
BENCHMARK(BM_InpaintSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InpaintParallel)->Apply(thread_args);
BENCHMARK(BM_CostVolumeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostVolumeParallel)->Apply(thread_args);

BENCHMARK_MAIN();
