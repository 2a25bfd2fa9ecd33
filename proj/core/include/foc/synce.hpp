#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "foc/image.hpp"
#include "foc/label.hpp"
#include "foc/rng.hpp"

namespace foc {

// Colored circle/ellipse ("bubble") on a black background. The 6 classes are
// {red, green, blue} x {circle, ellipse}; hue and axis ratio between the
// anchors produce fuzzy labels.
struct BubbleParams {
  double hue = 0.0;             // degrees in [0,360)
  double axis_ratio = 1.0;      // in [1,2]; 1=circle, 2=ellipse
  double center_row = 0.0;      // pixels
  double center_col = 0.0;
  double semi_minor_axis = 0.0; // pixels
  double rotation = 0.0;        // degrees in [0,180)
};

enum class SynSubsetKind { Ideal, Real, Fuzzy };

// Linear interpolation between the two adjacent color anchors 0/120/240 on the
// hue circle; returns (red, green, blue) probabilities.
std::array<double, 3> color_distribution(double hue);

// p_circle = 2 - ratio, p_ellipse = ratio - 1; ratio must be in [1,2].
std::array<double, 2> geometry_distribution(double axis_ratio);

// Flattened outer product in class order (red-circle, green-circle,
// blue-circle, red-ellipse, green-ellipse, blue-ellipse).
LabelDistribution fuzzy_label(const std::array<double, 3>& p_color,
                              const std::array<double, 2>& p_geometry);

// Filled full-saturation ellipse on black, 4x4 supersampled edges.
Image render_bubble(const BubbleParams& params, int image_size);

// Draw a class index from the fuzzy label distribution.
int sample_real_label(const LabelDistribution& l, Rng& rng);

struct SynceConfig {
  int certain_count = 1800;  // per split
  int fuzzy_count = 1000;    // per split
  int image_size = 32;
  std::uint64_t seed = 0;
};

// Generates images for the train/val/unlabeled splits and writes the
// ideal/real/fuzzy subset manifests plus synce_meta.csv into out_dir.
// Fully deterministic given the seed; images are shared between subsets.
void build_synce(const SynceConfig& config, const std::string& out_dir);

constexpr int kSynceClasses = 6;

// Manifest file name for a subset, e.g. "manifest_fuzzy.csv".
std::string synce_manifest_name(SynSubsetKind kind);

}  // namespace foc
