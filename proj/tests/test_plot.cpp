#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "foc/plot.hpp"
#include "test_helpers.hpp"

using namespace foc;
using namespace foc::test;

TEST_CASE("line chart rasterizes all series") {
  Series a{"a", {0.1, 0.5, 0.9}, {1.0f, 0.0f, 0.0f}};
  Series b{"b", {0.9, 0.4, 0.2}, {0.0f, 0.0f, 1.0f}};
  Image img = render_line_chart({a, b}, 200, 120);
  CHECK(img.width == 200);
  CHECK(img.height == 120);
  bool red = false, blue = false;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      if (img.at(0, y, x) > 0.8f && img.at(2, y, x) < 0.3f) red = true;
      if (img.at(2, y, x) > 0.8f && img.at(0, y, x) < 0.3f) blue = true;
    }
  CHECK(red);
  CHECK(blue);
}

TEST_CASE("bar chart handles nan values") {
  Image img = render_bar_chart({0.5, std::nan(""), 1.0}, 160, 100);
  CHECK(img.width == 160);
  for (float v : img.data) CHECK(std::isfinite(v));
}

TEST_CASE("cluster grid lays out member thumbnails") {
  Image red = solid_image(8, 1.0f, 0.0f, 0.0f);
  Image blue = solid_image(8, 0.0f, 0.0f, 1.0f);
  std::vector<std::vector<const Image*>> rows{{&red, &red}, {}, {&blue}};
  Image grid = render_cluster_grid(rows, 8, 4);
  CHECK(grid.height == 2 * 10 + 2);  // empty cluster row skipped
  CHECK(grid.at(0, 5, 5) == doctest::Approx(1.0));
}

TEST_CASE("metric and report plots are emitted from artifacts") {
  TempDir dir("foc_plot");
  {
    std::ofstream csv(dir.str() + "/metrics.csv");
    csv << "phase,epoch,head_type,loss_s,loss_u,val_f1,val_acc\n"
           "main,0,normal,1.5,-0.1,0.4,0.5\n"
           "main,0,overcluster,0.9,-0.1,0.4,0.5\n"
           "main,1,normal,1.2,-0.2,0.6,0.7\n"
           "main,1,overcluster,0.7,-0.2,0.6,0.7\n";
  }
  {
    std::ofstream rep(dir.str() + "/report.json");
    rep << R"({"per_class_f1": [0.5, 0.75, -1.0, 1.0]})";
  }
  plot_metrics_csv(dir.str() + "/metrics.csv", dir.str());
  plot_report_json(dir.str() + "/report.json", dir.str());
  for (const char* f : {"loss_curves.png", "val_f1.png", "f1_bars.png"}) {
    auto p = dir.str() + "/" + f;
    CHECK(std::filesystem::exists(p));
    CHECK(std::filesystem::file_size(p) > 0);
  }
}
