#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <doctest.h>

#include "recourse/attributions.hpp"
#include "recourse/profpic.hpp"
#include "recourse/rng.hpp"

using namespace recourse;

namespace {

std::string slurp(const std::string& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("dataset") {
  DatasetConfig cfg;
  auto a = generate_dataset(cfg), b = generate_dataset(cfg);
  REQUIRE(a.size() == 53);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pixels == b[i].pixels);
    CHECK(a[i].contrast == cfg.contrast_levels[i % cfg.contrast_levels.size()]);
    CHECK((a[i].label == Label::Accepted) == (a[i].contrast > cfg.cutoff));
    CHECK(std::abs(contrast_value(a[i].person, a[i].pixels) - a[i].contrast * a[i].contrast) < 1e-6);
    for (double v : a[i].pixels) CHECK((v >= 0.0 && v <= 255.0));
  }
}

TEST_CASE("threshold sweep") {
  auto data = generate_dataset(DatasetConfig{});
  Threshold t = threshold_sweep(data);
  CHECK(t.accuracy == 1.0);
  CHECK(t.lambda > 56.0 * 56.0);
  CHECK(t.lambda < 72.0 * 72.0);
}

TEST_CASE("contrast model gradient direction") {
  auto data = generate_dataset(DatasetConfig{});
  const ProfileImage& img = data[1];
  Model m = contrast_model(img);
  Vec g = vanilla_gradient(m, img.pixels).weights;
  double sign = img.person_value > img.background ? 1.0 : -1.0;
  for (std::size_t k = 0; k < g.size(); ++k) CHECK((img.person[k] ? sign : -sign) * g[k] > 0.0);
}

TEST_CASE("monte carlo smoothgrad matches the analytic map") {
  auto data = generate_dataset(DatasetConfig{});
  for (int id : {1, 5, 14, 27, 40}) {
    const ProfileImage& img = data[static_cast<std::size_t>(id)];
    Model m = contrast_model(img);
    SmoothGradConfig mc;
    mc.sigma = 5.0;
    mc.samples = 2000;
    mc.seed = static_cast<std::uint64_t>(id);
    Vec w = smoothgrad(m, img.pixels, mc).weights;
    Vec a = vanilla_gradient(m, img.pixels).weights;
    // grad f(x + e) - grad f(x) = 2 g (g . e) with g = 1_I/|I| - 1_J/|J|.
    double ni = 0, nj = 0;
    for (char p : img.person) (p ? ni : nj) += 1;
    double gnorm = std::sqrt(1.0 / ni + 1.0 / nj);
    for (std::size_t k = 0; k < w.size(); ++k) {
      double gk = img.person[k] ? 1.0 / ni : -1.0 / nj;
      double se = 2.0 * std::abs(gk) * mc.sigma * gnorm / std::sqrt(2000.0);
      CHECK(std::abs(w[k] - a[k]) <= 3.0 * se + 1e-12);
    }
  }
}

TEST_CASE("lime manual weights follow the aggregated gradient") {
  auto data = generate_dataset(DatasetConfig{});
  for (const auto& img : data) {
    if (img.contrast == 0.0) continue;
    Model m = contrast_model(img);
    LimeResult r = lime(m, img.pixels, manual_segments(img), LimeConfig{});
    Vec g = vanilla_gradient(m, img.pixels).weights;
    double gp = 0, gb = 0;
    for (std::size_t k = 0; k < g.size(); ++k) (img.person[k] ? gp : gb) += g[k];
    CHECK((r.segment_weights[0] > 0) == (gp > 0));
    CHECK((r.segment_weights[1] > 0) == (gb > 0));
  }
}

TEST_CASE("segments") {
  auto b = block_segments(16, 16, 8);
  CHECK(b[0] == 0);
  CHECK(b[8] == 1);
  CHECK(b[16 * 8] == 2);
  CHECK(b[255] == 3);
}

TEST_CASE("saliency rendering") {
  RgbImage z = saliency_image(Vec(16, 0.0), 4, 4);
  for (std::size_t i = 0; i < z.rgb.size(); ++i) CHECK(z.rgb[i] == 128);
  Vec w(16, 0.0);
  w[0] = 1.0;
  w[1] = -1.0;
  RgbImage s = saliency_image(w, 4, 4);
  CHECK(s.rgb[0] > s.rgb[2]);   // red
  CHECK(s.rgb[5] > s.rgb[3]);   // blue
  auto dir = std::filesystem::temp_directory_path() / "recourse_render_test";
  std::filesystem::create_directories(dir);
  render_saliency(w, 4, 4, (dir / "a").string());
  render_saliency(w, 4, 4, (dir / "b").string());
  CHECK(slurp((dir / "a.png").string()) == slurp((dir / "b.png").string()));
  CHECK(slurp((dir / "a.ppm").string()).rfind("P6", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiment on a small dataset") {
  DatasetConfig dc;
  dc.n = 13;
  auto data = generate_dataset(dc);
  ExperimentReport r = run_experiment(data, ExperimentConfig{});
  REQUIRE(r.images.size() == 13);
  CHECK(r.delta == doctest::Approx(128.0 * 64.0));
  for (const auto& io : r.images) {
    CHECK(io.sg_equals_vg);
    CHECK(io.ig_identity_error <= 1e-10);
    CHECK(io.methods.size() == experiment_methods().size());
    if (io.label == Label::Accepted) continue;
    bool zero = data[static_cast<std::size_t>(io.id)].contrast == 0.0;
    for (const auto& mo : io.methods)
      if (mo.method == "vanilla_gradient") CHECK((mo.verdict.status == VerdictStatus::Satisfied) == !zero);
  }
  auto j = to_json(r);
  CHECK(j["images"].size() == 13);
  CHECK(markdown_table(r).find("| image") != std::string::npos);
}
