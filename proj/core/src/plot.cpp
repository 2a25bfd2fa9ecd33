#include "foc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "foc/errors.hpp"

namespace foc {

namespace {

void draw_line(Image& img, double x0, double y0, double x1, double y1,
               const std::array<float, 3>& color) {
  double dx = x1 - x0, dy = y1 - y0;
  int steps = static_cast<int>(std::max(std::abs(dx), std::abs(dy))) * 2 + 1;
  for (int i = 0; i <= steps; ++i) {
    double t = static_cast<double>(i) / steps;
    int x = static_cast<int>(std::lround(x0 + t * dx));
    int y = static_cast<int>(std::lround(y0 + t * dy));
    if (x < 0 || x >= img.width || y < 0 || y >= img.height) continue;
    for (int c = 0; c < 3; ++c) img.at(c, y, x) = color[c];
  }
}

void fill_rect(Image& img, int x0, int y0, int x1, int y1,
               const std::array<float, 3>& color) {
  for (int y = std::max(0, y0); y <= std::min(img.height - 1, y1); ++y)
    for (int x = std::max(0, x0); x <= std::min(img.width - 1, x1); ++x)
      for (int c = 0; c < 3; ++c) img.at(c, y, x) = color[c];
}

const std::array<float, 3> kPalette[6] = {
    {0.85f, 0.2f, 0.2f}, {0.2f, 0.55f, 0.2f}, {0.2f, 0.3f, 0.85f},
    {0.8f, 0.6f, 0.1f},  {0.5f, 0.2f, 0.6f},  {0.1f, 0.6f, 0.6f}};

}  // namespace

Image render_line_chart(const std::vector<Series>& series, int width,
                        int height) {
  Image img(height, width, 3);
  std::fill(img.data.begin(), img.data.end(), 1.0f);  // white
  const int m = 40;                                   // margin
  draw_line(img, m, height - m, width - m, height - m, {0, 0, 0});
  draw_line(img, m, m, m, height - m, {0, 0, 0});

  double lo = 0.0, hi = 1e-9;
  std::size_t n = 0;
  for (const auto& s : series) {
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    n = std::max(n, s.values.size());
  }
  if (n < 2) n = 2;
  for (const auto& s : series) {
    double px = -1, py = -1;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      double v = s.values[i];
      if (!std::isfinite(v)) continue;
      double x = m + (width - 2.0 * m) * i / (n - 1);
      double y = height - m - (height - 2.0 * m) * (v - lo) / (hi - lo);
      if (px >= 0) draw_line(img, px, py, x, y, s.color);
      px = x;
      py = y;
    }
  }
  return img;
}

Image render_bar_chart(const std::vector<double>& values, int width,
                       int height) {
  Image img(height, width, 3);
  std::fill(img.data.begin(), img.data.end(), 1.0f);
  const int m = 40;
  draw_line(img, m, height - m, width - m, height - m, {0, 0, 0});
  if (values.empty()) return img;
  double hi = 1e-9;
  for (double v : values)
    if (std::isfinite(v)) hi = std::max(hi, v);
  const double band = (width - 2.0 * m) / values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    int x0 = static_cast<int>(m + band * i + band * 0.15);
    int x1 = static_cast<int>(m + band * (i + 1) - band * 0.15);
    int y1 = height - m - 1;
    int y0 = static_cast<int>(height - m - (height - 2.0 * m) * values[i] / hi);
    fill_rect(img, x0, y0, x1, y1, kPalette[i % 6]);
  }
  return img;
}

Image render_cluster_grid(const std::vector<std::vector<const Image*>>& rows,
                          int thumb, int max_per_row) {
  int n_rows = 0, n_cols = 1;
  for (const auto& r : rows) {
    if (r.empty()) continue;
    ++n_rows;
    n_cols = std::max(n_cols, std::min<int>(max_per_row, static_cast<int>(r.size())));
  }
  if (n_rows == 0) n_rows = 1;
  const int pad = 2;
  Image img(n_rows * (thumb + pad) + pad, n_cols * (thumb + pad) + pad, 3);
  std::fill(img.data.begin(), img.data.end(), 1.0f);
  int row = 0;
  for (const auto& r : rows) {
    if (r.empty()) continue;
    for (int col = 0; col < std::min<int>(max_per_row, static_cast<int>(r.size())); ++col) {
      const Image& src = *r[col];
      int oy = pad + row * (thumb + pad);
      int ox = pad + col * (thumb + pad);
      for (int y = 0; y < thumb && y < src.height; ++y)
        for (int x = 0; x < thumb && x < src.width; ++x)
          for (int c = 0; c < 3; ++c)
            img.at(c, oy + y, ox + x) =
                src.channels == 3 ? src.at(c, y, x) : src.at(0, y, x);
    }
    ++row;
  }
  return img;
}

void plot_metrics_csv(const std::string& csv_path, const std::string& out_dir) {
  std::ifstream in(csv_path);
  if (!in) throw DataError("plot: cannot open " + csv_path);
  std::string line;
  std::getline(in, line);  // header
  Series loss_s_n{"loss_s normal", {}, kPalette[0]};
  Series loss_u_n{"loss_u normal", {}, kPalette[1]};
  Series loss_s_o{"loss_s overcluster", {}, kPalette[2]};
  Series loss_u_o{"loss_u overcluster", {}, kPalette[3]};
  Series val_f1{"val_f1", {}, kPalette[4]};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string phase, epoch, head, ls, lu, f1, acc;
    std::getline(ss, phase, ',');
    std::getline(ss, epoch, ',');
    std::getline(ss, head, ',');
    std::getline(ss, ls, ',');
    std::getline(ss, lu, ',');
    std::getline(ss, f1, ',');
    std::getline(ss, acc, ',');
    double vs = std::stod(ls), vu = std::stod(lu);
    if (head == "normal") {
      loss_s_n.values.push_back(vs);
      loss_u_n.values.push_back(vu);
      double v = f1 == "nan" || f1 == "-nan" ? std::nan("") : std::stod(f1);
      val_f1.values.push_back(v);
    } else {
      loss_s_o.values.push_back(vs);
      loss_u_o.values.push_back(vu);
    }
  }
  save_png(out_dir + "/loss_curves.png",
           render_line_chart({loss_s_n, loss_u_n, loss_s_o, loss_u_o}));
  save_png(out_dir + "/val_f1.png", render_line_chart({val_f1}));
}

void plot_report_json(const std::string& report_path,
                      const std::string& out_dir) {
  std::ifstream in(report_path);
  if (!in) throw DataError("plot: cannot open " + report_path);
  nlohmann::json j = nlohmann::json::parse(in);
  std::vector<double> f1s;
  if (j.contains("per_class_f1"))
    for (double v : j["per_class_f1"]) f1s.push_back(v < 0 ? std::nan("") : v);
  save_png(out_dir + "/f1_bars.png", render_bar_chart(f1s));
}

}  // namespace foc
