#include "foc/synce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "foc/errors.hpp"

namespace fs = std::filesystem;

namespace foc {

std::array<double, 3> color_distribution(double hue) {
  if (hue < 0.0 || hue >= 360.0)
    throw DataError("color_distribution: hue out of [0,360)");
  std::array<double, 3> p{0.0, 0.0, 0.0};
  // anchors: 0 -> red, 120 -> green, 240 -> blue, wrapping 240..360 -> red
  int seg = static_cast<int>(hue / 120.0);  // 0,1,2
  double a = 120.0 * seg;
  int ia = seg;
  int ib = (seg + 1) % 3;
  p[ia] = (a + 120.0 - hue) / 120.0;
  p[ib] = (hue - a) / 120.0;
  return p;
}

std::array<double, 2> geometry_distribution(double axis_ratio) {
  if (axis_ratio < 1.0 || axis_ratio > 2.0)
    throw DataError("geometry_distribution: axis ratio out of [1,2]");
  return {2.0 - axis_ratio, axis_ratio - 1.0};
}

LabelDistribution fuzzy_label(const std::array<double, 3>& p_color,
                              const std::array<double, 2>& p_geometry) {
  std::vector<double> l(kSynceClasses);
  for (int g = 0; g < 2; ++g)
    for (int c = 0; c < 3; ++c) l[g * 3 + c] = p_color[c] * p_geometry[g];
  return LabelDistribution(std::move(l));
}

Image render_bubble(const BubbleParams& params, int image_size) {
  const double b = params.semi_minor_axis;
  const double a = params.axis_ratio * b;
  const double theta = params.rotation * M_PI / 180.0;
  const double ct = std::cos(theta), st = std::sin(theta);
  if (params.center_row - a < 0 || params.center_row + a > image_size - 1 ||
      params.center_col - a < 0 || params.center_col + a > image_size - 1)
    throw DataError("render_bubble: ellipse does not fit inside the image");

  auto rgb = hsv_to_rgb(params.hue, 1.0, 1.0);
  Image img(image_size, image_size, 3);
  const int ss = 4;  // supersampling grid per pixel
  for (int y = 0; y < image_size; ++y) {
    for (int x = 0; x < image_size; ++x) {
      int hits = 0;
      for (int sy = 0; sy < ss; ++sy) {
        for (int sx = 0; sx < ss; ++sx) {
          double py = y + (sy + 0.5) / ss - 0.5 - params.center_row;
          double px = x + (sx + 0.5) / ss - 0.5 - params.center_col;
          double u = ct * px + st * py;   // along major axis
          double w = -st * px + ct * py;  // along minor axis
          double d = (u / a) * (u / a) + (w / b) * (w / b);
          if (d <= 1.0) ++hits;
        }
      }
      if (hits > 0) {
        double cov = static_cast<double>(hits) / (ss * ss);
        for (int c = 0; c < 3; ++c)
          img.at(c, y, x) = static_cast<float>(cov * rgb[c]);
      }
    }
  }
  return img;
}

int sample_real_label(const LabelDistribution& l, Rng& rng) {
  double u = uniform_real(rng, 0.0, 1.0);
  double acc = 0.0;
  for (std::size_t c = 0; c < l.size(); ++c) {
    acc += l[c];
    if (u < acc) return static_cast<int>(c);
  }
  return static_cast<int>(l.size()) - 1;
}

std::string synce_manifest_name(SynSubsetKind kind) {
  switch (kind) {
    case SynSubsetKind::Ideal: return "manifest_ideal.csv";
    case SynSubsetKind::Real: return "manifest_real.csv";
    case SynSubsetKind::Fuzzy: return "manifest_fuzzy.csv";
  }
  return {};
}

namespace {

constexpr double kAnchors[3] = {0.0, 120.0, 240.0};

struct GeneratedImage {
  std::string path;
  double hue = 0.0;
  double axis_ratio = 1.0;
  LabelDistribution label;
  bool certain = false;
  int split = 0;          // 0=train, 1=val, 2=unlabeled
  int sampled_class = 0;  // Real-subset label, drawn once at generation
};

// Placement drawn in fixed order so the per-image stream is reproducible.
BubbleParams draw_placement(Rng& rng, double hue, double ratio, int size) {
  BubbleParams p;
  p.hue = hue;
  p.axis_ratio = ratio;
  p.rotation = uniform_real(rng, 0.0, 180.0);
  p.semi_minor_axis = uniform_real(rng, 0.15 * size, 0.30 * size);
  double a = ratio * p.semi_minor_axis;
  double a_max = (size - 3) / 2.0;
  if (a > a_max) {
    p.semi_minor_axis = a_max / ratio;
    a = a_max;
  }
  double lo = std::max(0.2 * size, a + 1.0);
  double hi = std::min(0.8 * size, size - 2.0 - a);
  if (lo > hi) {
    lo = a + 1.0;
    hi = size - 2.0 - a;
  }
  p.center_row = uniform_real(rng, lo, hi);
  p.center_col = uniform_real(rng, lo, hi);
  return p;
}

void write_vote_row(std::ofstream& out, const std::string& path,
                    const std::string& split,
                    const std::array<std::int64_t, kSynceClasses>& votes) {
  out << path << ',' << split;
  for (auto v : votes) out << ',' << v;
  out << '\n';
}

std::array<std::int64_t, kSynceClasses> one_hot_votes(int cls) {
  std::array<std::int64_t, kSynceClasses> v{};
  v[cls] = 1;
  return v;
}

std::array<std::int64_t, kSynceClasses> soft_votes(const LabelDistribution& l) {
  // scale by 1000 so the integer vote format carries soft labels
  std::array<std::int64_t, kSynceClasses> v{};
  for (int c = 0; c < kSynceClasses; ++c)
    v[c] = static_cast<std::int64_t>(std::llround(l[c] * 1000.0));
  if (std::all_of(v.begin(), v.end(), [](auto x) { return x == 0; }))
    v[hard_label(l)] = 1;
  return v;
}

}  // namespace

void build_synce(const SynceConfig& config, const std::string& out_dir) {
  if (config.certain_count % kSynceClasses != 0)
    std::fprintf(stderr,
                 "warning: certain_count %d not divisible by %d; "
                 "classes balanced up to +-1\n",
                 config.certain_count, kSynceClasses);

  fs::create_directories(fs::path(out_dir) / "images");
  const char* split_names[3] = {"train", "val", "unlabeled"};
  std::vector<GeneratedImage> all;

  for (int split = 0; split < 3; ++split) {
    for (int i = 0; i < config.certain_count; ++i) {
      Rng rng(derive_seed(config.seed, split, 0, i));
      int cls = i % kSynceClasses;
      double hue = kAnchors[cls % 3];
      double ratio = cls < 3 ? 1.0 : 2.0;
      BubbleParams p = draw_placement(rng, hue, ratio, config.image_size);
      GeneratedImage g{
          .path = std::string("images/") + split_names[split] + "_certain_" +
                  std::to_string(i) + ".png",
          .hue = hue,
          .axis_ratio = ratio,
          .label = fuzzy_label(color_distribution(hue),
                               geometry_distribution(ratio)),
          .certain = true,
          .split = split};
      g.sampled_class = cls;
      save_png(out_dir + "/" + g.path,
               render_bubble(p, config.image_size));
      all.push_back(std::move(g));
    }
    for (int i = 0; i < config.fuzzy_count; ++i) {
      Rng rng(derive_seed(config.seed, split, 1, i));
      double hue, ratio;
      do {
        hue = uniform_real(rng, 0.0, 360.0);
      } while (hue == kAnchors[0] || hue == kAnchors[1] || hue == kAnchors[2]);
      do {
        ratio = uniform_real(rng, 1.0, 2.0);
      } while (ratio == 1.0 || ratio == 2.0);
      BubbleParams p = draw_placement(rng, hue, ratio, config.image_size);
      GeneratedImage g{
          .path = std::string("images/") + split_names[split] + "_fuzzy_" +
                  std::to_string(i) + ".png",
          .hue = hue,
          .axis_ratio = ratio,
          .label = fuzzy_label(color_distribution(hue),
                               geometry_distribution(ratio)),
          .certain = false,
          .split = split};
      g.sampled_class = sample_real_label(g.label, rng);
      save_png(out_dir + "/" + g.path,
               render_bubble(p, config.image_size));
      all.push_back(std::move(g));
    }
  }

  // meta file with analytic ground truth for oracle evaluation
  {
    std::ofstream meta(out_dir + "/synce_meta.csv");
    meta << "path,hue,axis_ratio";
    for (int c = 0; c < kSynceClasses; ++c) meta << ",l_" << c;
    meta << '\n';
    meta << std::setprecision(17);
    for (const auto& g : all) {
      meta << g.path << ',' << g.hue << ',' << g.axis_ratio;
      for (int c = 0; c < kSynceClasses; ++c) meta << ',' << g.label[c];
      meta << '\n';
    }
  }

  for (SynSubsetKind kind : {SynSubsetKind::Ideal, SynSubsetKind::Real,
                             SynSubsetKind::Fuzzy}) {
    std::ofstream out(out_dir + "/" + synce_manifest_name(kind));
    out << "path,split";
    for (int c = 0; c < kSynceClasses; ++c) out << ",vote_" << c;
    out << '\n';
    for (const auto& g : all) {
      if (g.certain) {
        // certain images keep their one-hot label in every subset
        const char* split = split_names[g.split];
        auto votes = g.split == 2 ? soft_votes(g.label)
                                  : one_hot_votes(hard_label(g.label));
        write_vote_row(out, g.path, split, votes);
        continue;
      }
      switch (kind) {
        case SynSubsetKind::Ideal:
          write_vote_row(out, g.path, split_names[g.split],
                         g.split == 2 ? soft_votes(g.label)
                                      : one_hot_votes(hard_label(g.label)));
          break;
        case SynSubsetKind::Real:
          write_vote_row(out, g.path, split_names[g.split],
                         g.split == 2 ? soft_votes(g.label)
                                      : one_hot_votes(g.sampled_class));
          break;
        case SynSubsetKind::Fuzzy:
          // fuzzy images never appear as labeled training data
          write_vote_row(out, g.path,
                         g.split == 0 ? "unlabeled" : split_names[g.split],
                         soft_votes(g.label));
          break;
      }
    }
  }
}

}  // namespace foc
