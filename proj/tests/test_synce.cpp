#include <doctest.h>

#include <fstream>
#include <sstream>

#include "foc/errors.hpp"
#include "foc/synce.hpp"
#include "test_helpers.hpp"

using namespace foc;
using namespace foc::test;

TEST_CASE("color_distribution interpolates between hue anchors") {
  auto p0 = color_distribution(0.0);
  CHECK(p0[0] == doctest::Approx(1.0));
  CHECK(p0[1] == doctest::Approx(0.0));

  auto p60 = color_distribution(60.0);
  CHECK(p60[0] == doctest::Approx(0.5));
  CHECK(p60[1] == doctest::Approx(0.5));
  CHECK(p60[2] == doctest::Approx(0.0));

  auto p300 = color_distribution(300.0);
  CHECK(p300[0] == doctest::Approx(0.5));
  CHECK(p300[1] == doctest::Approx(0.0));
  CHECK(p300[2] == doctest::Approx(0.5));
}

TEST_CASE("color_distribution is continuous and exact at anchors") {
  for (double anchor : {0.0, 120.0, 240.0}) {
    auto p = color_distribution(anchor);
    int idx = static_cast<int>(anchor / 120.0);
    CHECK(p[idx] == doctest::Approx(1.0));
    if (anchor > 0.0) {
      auto lo = color_distribution(anchor - 1e-9);
      for (int c = 0; c < 3; ++c) CHECK(lo[c] == doctest::Approx(p[c]).epsilon(1e-6));
    }
  }
  // continuity at the 360 -> 0 wrap
  auto hi = color_distribution(360.0 - 1e-9);
  CHECK(hi[0] == doctest::Approx(1.0));
}

TEST_CASE("geometry_distribution is linear in the axis ratio") {
  CHECK(geometry_distribution(1.0) == std::array<double, 2>{1.0, 0.0});
  CHECK(geometry_distribution(2.0) == std::array<double, 2>{0.0, 1.0});
  auto mid = geometry_distribution(1.5);
  CHECK(mid[0] == doctest::Approx(0.5));
  CHECK(mid[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(geometry_distribution(0.9), DataError);
  CHECK_THROWS_AS(geometry_distribution(2.1), DataError);
}

TEST_CASE("fuzzy_label is the flattened outer product") {
  auto l = fuzzy_label({1, 0, 0}, {1, 0});
  CHECK(l.probs() == std::vector<double>{1, 0, 0, 0, 0, 0});

  auto l2 = fuzzy_label({0.5, 0.5, 0}, {0.5, 0.5});
  for (int i : {0, 1, 3, 4}) CHECK(l2[i] == doctest::Approx(0.25));
  CHECK(l2[2] == doctest::Approx(0.0));

  auto l3 = fuzzy_label({0.75, 0.25, 0}, {1, 0});
  CHECK(l3[0] == doctest::Approx(0.75));
  CHECK(l3[1] == doctest::Approx(0.25));
  for (int i : {2, 3, 4, 5}) CHECK(l3[i] == doctest::Approx(0.0));
}

TEST_CASE("generated fuzzy labels sum to 1 with at most 4 nonzero entries") {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    double hue = uniform_real(rng, 0.0, 360.0);
    double ratio = uniform_real(rng, 1.0, 2.0);
    auto l = fuzzy_label(color_distribution(hue), geometry_distribution(ratio));
    double sum = 0.0;
    int nonzero = 0;
    for (std::size_t c = 0; c < l.size(); ++c) {
      sum += l[c];
      if (l[c] > 0.0) ++nonzero;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nonzero <= 4);
  }
}

TEST_CASE("render_bubble draws a pure-color disc on black") {
  BubbleParams p;
  p.hue = 0.0;
  p.axis_ratio = 1.0;
  p.center_row = p.center_col = 16.0;
  p.semi_minor_axis = 6.0;
  Image img = render_bubble(p, 32);

  CHECK(img.at(0, 0, 0) == 0.0f);
  CHECK(img.at(1, 31, 31) == 0.0f);
  CHECK(img.at(2, 0, 31) == 0.0f);
  CHECK(img.at(0, 16, 16) == doctest::Approx(1.0));
  CHECK(img.at(1, 16, 16) == doctest::Approx(0.0));
  CHECK(img.at(2, 16, 16) == doctest::Approx(0.0));

  int area = 0;
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      if (img.at(0, y, x) > 0.5f) ++area;
  CHECK(area == doctest::Approx(3.14159 * 36).epsilon(0.15));

  p.center_row = 2.0;  // does not fit
  CHECK_THROWS_AS(render_bubble(p, 32), DataError);
}

TEST_CASE("render_bubble respects the axis ratio") {
  BubbleParams p;
  p.hue = 240.0;
  p.axis_ratio = 2.0;
  p.center_row = p.center_col = 16.0;
  p.semi_minor_axis = 4.0;
  p.rotation = 0.0;  // major axis horizontal
  Image img = render_bubble(p, 32);
  int w = 0, h = 0;
  for (int x = 0; x < 32; ++x)
    if (img.at(2, 16, x) > 0.5f) ++w;
  for (int y = 0; y < 32; ++y)
    if (img.at(2, y, 16) > 0.5f) ++h;
  CHECK(static_cast<double>(w) / h == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("sample_real_label follows the label distribution") {
  Rng rng(3);
  LabelDistribution sure({1, 0, 0, 0, 0, 0});
  for (int t = 0; t < 20; ++t) CHECK(sample_real_label(sure, rng) == 0);
  LabelDistribution last({0, 0, 0, 0, 0, 1});
  for (int t = 0; t < 20; ++t) CHECK(sample_real_label(last, rng) == 5);

  LabelDistribution half({0.5, 0.5, 0, 0, 0, 0});
  int zeros = 0;
  for (int t = 0; t < 10000; ++t)
    if (sample_real_label(half, rng) == 0) ++zeros;
  CHECK(zeros / 10000.0 == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("build_synce emits deterministic subset manifests") {
  TempDir a("foc_synce_a"), b("foc_synce_b");
  SynceConfig cfg;
  cfg.certain_count = 12;
  cfg.fuzzy_count = 6;
  cfg.seed = 5;
  build_synce(cfg, a.str());
  build_synce(cfg, b.str());

  for (const char* name :
       {"manifest_ideal.csv", "manifest_real.csv", "manifest_fuzzy.csv",
        "synce_meta.csv"}) {
    std::ifstream fa(a.str() + "/" + name), fb(b.str() + "/" + name);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(!sa.str().empty());
  }
}

TEST_CASE("subset manifests implement the labeling protocol") {
  TempDir dir("foc_synce_sub");
  SynceConfig cfg;
  cfg.certain_count = 12;
  cfg.fuzzy_count = 6;
  cfg.seed = 5;
  build_synce(cfg, dir.str());

  auto rows = [&](const char* name) {
    return read_manifest_rows(dir.str(), dir.str() + "/" + name, false);
  };

  // Ideal/Fuzzy share image files, differing only in manifests
  auto ideal = rows("manifest_ideal.csv");
  auto fuzzy = rows("manifest_fuzzy.csv");
  REQUIRE(ideal.size() == fuzzy.size());
  for (std::size_t i = 0; i < ideal.size(); ++i)
    CHECK(ideal[i].path == fuzzy[i].path);

  // Fuzzy subset: training rows are all certain, train-fuzzy routed unlabeled
  int fuzzy_train = 0, fuzzy_unlabeled_fuzzy = 0;
  for (const auto& s : fuzzy) {
    if (s.split_tag == SplitTag::Train) {
      ++fuzzy_train;
      CHECK(is_certain(s.label()));
    }
    if (s.split_tag == SplitTag::Unlabeled &&
        s.path.find("fuzzy") != std::string::npos)
      ++fuzzy_unlabeled_fuzzy;
  }
  CHECK(fuzzy_train == cfg.certain_count);
  CHECK(fuzzy_unlabeled_fuzzy == 2 * cfg.fuzzy_count);

  // Ideal subset: train-fuzzy rows carry the hard analytic label
  for (const auto& s : ideal)
    if (s.split_tag == SplitTag::Train &&
        s.path.find("fuzzy") != std::string::npos)
      CHECK(is_certain(s.label()));

  // Real subset trains on sampled hard labels, which sometimes disagree
  // with the analytic argmax (checked over the whole train split)
  auto real = rows("manifest_real.csv");
  int disagree = 0;
  for (std::size_t i = 0; i < real.size(); ++i) {
    if (real[i].split_tag != SplitTag::Train) continue;
    CHECK(is_certain(real[i].label()));
    if (hard_label(real[i].label()) != hard_label(ideal[i].label())) ++disagree;
  }
  CHECK(disagree > 0);
}

TEST_CASE("synce certainty matches anchor hue and ratio") {
  TempDir dir("foc_synce_cert");
  SynceConfig cfg;
  cfg.certain_count = 6;
  cfg.fuzzy_count = 4;
  cfg.seed = 1;
  build_synce(cfg, dir.str());

  std::ifstream meta(dir.str() + "/synce_meta.csv");
  std::string line;
  std::getline(meta, line);
  CHECK(line.rfind("path,hue,axis_ratio,l_0", 0) == 0);
  while (std::getline(meta, line)) {
    std::stringstream ss(line);
    std::string path, hue_s, ratio_s;
    std::getline(ss, path, ',');
    std::getline(ss, hue_s, ',');
    std::getline(ss, ratio_s, ',');
    double hue = std::stod(hue_s), ratio = std::stod(ratio_s);
    bool anchor = (hue == 0.0 || hue == 120.0 || hue == 240.0) &&
                  (ratio == 1.0 || ratio == 2.0);
    CHECK(anchor == (path.find("certain") != std::string::npos));
  }
}
