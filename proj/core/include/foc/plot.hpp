#pragma once

#include <array>
#include <string>
#include <vector>

#include "foc/image.hpp"

namespace foc {

struct Series {
  std::string name;
  std::vector<double> values;
  std::array<float, 3> color{0.0f, 0.0f, 0.0f};
};

// Simple rasterized line chart on white background.
Image render_line_chart(const std::vector<Series>& series, int width = 640,
                        int height = 400);

Image render_bar_chart(const std::vector<double>& values, int width = 640,
                       int height = 400);

// Grid of thumbnails, one row per cluster (clusters with no members skipped).
Image render_cluster_grid(const std::vector<std::vector<const Image*>>& rows,
                          int thumb = 32, int max_per_row = 16);

// loss_curves.png and val_f1.png from a trainer metrics CSV.
void plot_metrics_csv(const std::string& csv_path, const std::string& out_dir);

// f1_bars.png from an evaluation report JSON.
void plot_report_json(const std::string& report_path,
                      const std::string& out_dir);

}  // namespace foc
