// Every parallel kernel against its serial reference, bit for bit.

#include <doctest.h>

#include "recourse/attributions.hpp"
#include "recourse/exec.hpp"
#include "recourse/models.hpp"
#include "recourse/multidim.hpp"
#include "recourse/onedim.hpp"
#include "recourse/profpic.hpp"
#include "recourse/verify.hpp"

using namespace recourse;

namespace {

struct Threads {
  Threads() { set_thread_count(4); }
  ~Threads() { set_thread_count(0); }
};

}  // namespace

TEST_CASE_FIXTURE(Threads, "sampled L/R/O") {
  RecourseProblem p(models::notch(), UtilitySpec::difference(), 0.6, 1.0);
  SampleGrid g{-3, 3, 1e-3};
  LRO s = compute_lro(p, LroMode::Sampled, g, Exec::Serial), q = compute_lro(p, LroMode::Sampled, g, Exec::Parallel);
  CHECK(s.L == q.L);
  CHECK(s.R == q.R);
  CHECK(s.O == q.O);
}

TEST_CASE_FIXTURE(Threads, "raster regions and decision") {
  RecourseProblem p(models::circle_sq(), UtilitySpec::flip(), 0.0, 1.0, ConstraintSpec::sparse(1));
  RasterSpec spec;
  spec.n = {80, 80};
  AxisRegions s = compute_axis_regions(p, RegionRep::Raster, spec, Exec::Serial);
  AxisRegions q = compute_axis_regions(p, RegionRep::Raster, spec, Exec::Parallel);
  CHECK(s.sets == q.sets);
  CHECK(s.O == q.O);
  AxisCertificate cs = decide_axes(s, Exec::Serial), cq = decide_axes(q, Exec::Parallel);
  CHECK(cs.conflicts == cq.conflicts);
  REQUIRE(cs.witness);
  CHECK(cs.witness->point == cq.witness->point);
}

TEST_CASE_FIXTURE(Threads, "monte carlo attributions") {
  Model m = models::linear({1, -2, 0.5, 3, 1});
  Vec x{1, 2, 3, 4, 5};
  SmoothGradConfig sg;
  sg.samples = 777;
  CHECK(smoothgrad(models::quad(), Vec{0.3}, sg, Exec::Serial).weights ==
        smoothgrad(models::quad(), Vec{0.3}, sg, Exec::Parallel).weights);
  LimeConfig lc;
  lc.samples = 999;
  CHECK(lime(m, x, {0, 0, 1, 1, 2}, lc, Exec::Serial).segment_weights ==
        lime(m, x, {0, 0, 1, 1, 2}, lc, Exec::Parallel).segment_weights);
  ShapConfig sc{{}, ShapMode::Sampled, 300, 4};
  CHECK(kernel_shap(m, x, sc, {}, Exec::Serial).feature_values == kernel_shap(m, x, sc, {}, Exec::Parallel).feature_values);
  CHECK(coalition_table(m, x, Vec(5, 0.0), {}, Exec::Serial) == coalition_table(m, x, Vec(5, 0.0), {}, Exec::Parallel));
}

TEST_CASE_FIXTURE(Threads, "scan and probe") {
  RecourseProblem p(models::circle(), UtilitySpec::class_score(), 0.0, 1.0);
  Evaluator phi = projection_evaluator(default_family_builder(p));
  auto grid = grid_2d(-0.9, 0.9, -0.9, 0.9, 12, 12);
  ScanReport a = scan_recourse(p, phi, grid, {}, Exec::Serial), b = scan_recourse(p, phi, grid, {}, Exec::Parallel);
  CHECK(to_json(a) == to_json(b));
  JumpReport ja = continuity_probe(phi, grid, 1e-3, 0.1, Exec::Serial);
  JumpReport jb = continuity_probe(phi, grid, 1e-3, 0.1, Exec::Parallel);
  CHECK(to_json(ja) == to_json(jb));
}

TEST_CASE_FIXTURE(Threads, "profile-picture experiment") {
  DatasetConfig dc;
  dc.n = 6;
  auto data = generate_dataset(dc);
  ExperimentConfig ec;
  ec.shap.coalitions = 256;
  ec.lime.samples = 400;
  CHECK(to_json(run_experiment(data, ec, Exec::Serial), true) == to_json(run_experiment(data, ec, Exec::Parallel), true));
}
