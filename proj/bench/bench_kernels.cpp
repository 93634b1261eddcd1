// Serial reference against the OpenMP path for each parallel kernel.
// Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "recourse/attributions.hpp"
#include "recourse/models.hpp"
#include "recourse/multidim.hpp"
#include "recourse/onedim.hpp"
#include "recourse/profpic.hpp"
#include "recourse/verify.hpp"

using namespace recourse;

namespace {

Exec exec_arg(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_SampledLro(benchmark::State& s) {
  RecourseProblem p(models::quad(), UtilitySpec::difference(), 1.0, 2.0);
  for (auto _ : s) benchmark::DoNotOptimize(compute_lro(p, LroMode::Sampled, SampleGrid{-5, 5, 1e-3}, exec_arg(s)));
}
BENCHMARK(BM_SampledLro)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RasterRegions(benchmark::State& s) {
  RecourseProblem p(models::circle_sq(), UtilitySpec::flip(), 0.0, 1.0, ConstraintSpec::sparse(1));
  RasterSpec spec;
  spec.n = {200, 200};
  for (auto _ : s) benchmark::DoNotOptimize(compute_axis_regions(p, RegionRep::Raster, spec, exec_arg(s)));
}
BENCHMARK(BM_RasterRegions)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CoalitionTable(benchmark::State& s) {
  Model m = models::linear(Vec(14, 0.5));
  Vec x(14, 1.0), b(14, 0.0);
  for (auto _ : s) benchmark::DoNotOptimize(coalition_table(m, x, b, {}, exec_arg(s)));
}
BENCHMARK(BM_CoalitionTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ScanRecourse(benchmark::State& s) {
  RecourseProblem p(models::circle(), UtilitySpec::class_score(), 0.0, 1.0);
  Evaluator phi = projection_evaluator(default_family_builder(p));
  std::vector<Vec> grid = grid_2d(-0.9, 0.9, -0.9, 0.9, 20, 20);
  for (auto _ : s) benchmark::DoNotOptimize(scan_recourse(p, phi, grid, {}, exec_arg(s)));
}
BENCHMARK(BM_ScanRecourse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Lime(benchmark::State& s) {
  DatasetConfig dc;
  dc.n = 4;
  auto data = generate_dataset(dc);
  const ProfileImage& img = data[1];
  Model m = contrast_model(img);
  std::vector<int> seg = block_segments(img.height, img.width, 8);
  LimeConfig cfg;
  for (auto _ : s) benchmark::DoNotOptimize(lime(m, img.pixels, seg, cfg, exec_arg(s)));
}
BENCHMARK(BM_Lime)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
