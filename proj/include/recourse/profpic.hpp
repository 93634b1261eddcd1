#pragma once
// Synthetic profile-picture experiment: silhouettes over flat backgrounds, a
// squared-contrast classifier, every attribution method, and recourse checks.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "recourse/attributions.hpp"
#include "recourse/core.hpp"
#include "recourse/exec.hpp"
#include "recourse/image_io.hpp"
#include "recourse/verify.hpp"

namespace recourse {

enum class Label { Accepted, Rejected };
std::string label_name(Label l);

struct ProfileImage {
  int id = 0;
  std::size_t width = 0, height = 0;
  Vec pixels;                // row-major gray values in [0, 255]
  std::vector<char> person;  // 1 on I_per, 0 on J_back
  Label label = Label::Rejected;
  double background = 0.0;
  double person_value = 0.0;
  double contrast = 0.0;     // |person - background| at generation
};

struct DatasetConfig {
  std::size_t n = 53;
  std::size_t height = 64, width = 64;
  // Image i gets contrast_levels[i % size]; the first level must be 0.
  std::vector<double> contrast_levels{0, 24, 32, 40, 48, 56, 72, 80, 88, 96, 112, 128};
  double cutoff = 60.0;  // accepted iff contrast > cutoff
  std::uint64_t seed = 0;
};

std::vector<ProfileImage> generate_dataset(const DatasetConfig& cfg);

// Squared difference of the person and background means of x.
double contrast_value(const std::vector<char>& person, Point x);
// The classifier on the image's mask, with analytic (affine) gradient and the
// probe direction 1_I/|I| - 1_J/|J|.
Model contrast_model(const ProfileImage& img);

struct Threshold {
  double lambda = 0.0;
  double accuracy = 0.0;
};
// Midpoints between sorted distinct scores plus one below and one above; the
// most accurate wins, ties to the smallest lambda.
Threshold threshold_sweep(const std::vector<ProfileImage>& data);

std::vector<int> block_segments(std::size_t height, std::size_t width, std::size_t block);
std::vector<int> manual_segments(const ProfileImage& img);  // person 0, background 1

inline constexpr double kFlatMap = 1e-9;

struct ExperimentConfig {
  double delta = 0.0;  // <= 0: 128 gray levels per pixel, i.e. 128 * sqrt(N)
  std::size_t block = 8;
  LimeConfig lime;
  ShapConfig shap{Vec{}, ShapMode::Sampled, 2048, 0};
  Resolution resolution;
  std::uint64_t seed = 0;
};

struct MethodOutcome {
  std::string method;
  Vec weights;
  double max_abs = 0.0;
  bool flat = false;
  RecourseVerdict verdict;
};

struct ImageOutcome {
  int id = 0;
  Label label = Label::Rejected;
  double score = 0.0;
  bool sg_equals_vg = false;
  double ig_identity_error = 0.0;  // max_k |IG_k - x_k VG(x/2)_k|
  std::vector<MethodOutcome> methods;
};

struct ExperimentReport {
  Threshold threshold;
  double delta = 0.0;
  std::vector<ImageOutcome> images;
};

std::vector<std::string> experiment_methods();
ExperimentReport run_experiment(const std::vector<ProfileImage>& data, const ExperimentConfig& cfg,
                                Exec exec = Exec::Parallel);

// Diverging map, symmetric about 0 at max |w|: 0 is mid-gray, positive red,
// negative blue.
RgbImage saliency_image(const Vec& weights, std::size_t width, std::size_t height);
// Writes <stem>.png and <stem>.ppm.
void render_saliency(const Vec& weights, std::size_t width, std::size_t height, const std::string& stem);
GrayImage gray_image(const ProfileImage& img);

nlohmann::json manifest(const std::vector<ProfileImage>& data, const DatasetConfig& cfg);
nlohmann::json to_json(const ExperimentReport& r, bool include_weights = false);
std::string markdown_table(const ExperimentReport& r);

}  // namespace recourse
