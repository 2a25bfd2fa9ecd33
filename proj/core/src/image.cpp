#include "foc/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "foc/errors.hpp"

namespace foc {

std::array<double, 3> hsv_to_rgb(double hue, double s, double v) {
  hue = std::fmod(hue, 360.0);
  if (hue < 0) hue += 360.0;
  double c = v * s;
  double hp = hue / 60.0;
  double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  double m = v - c;
  return {r + m, g + m, b + m};
}

std::array<double, 3> rgb_to_hsv(double r, double g, double b) {
  double mx = std::max({r, g, b});
  double mn = std::min({r, g, b});
  double d = mx - mn;
  double h = 0;
  if (d > 0) {
    if (mx == r) h = 60.0 * std::fmod((g - b) / d, 6.0);
    else if (mx == g) h = 60.0 * ((b - r) / d + 2.0);
    else h = 60.0 * ((r - g) / d + 4.0);
    if (h < 0) h += 360.0;
  }
  double s = mx > 0 ? d / mx : 0.0;
  return {h, s, mx};
}

Image load_png(const std::string& path) {
  cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (m.empty()) throw DataError("load_png: cannot read " + path);
  Image img(m.rows, m.cols, m.channels() == 1 ? 1 : 3);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      if (m.channels() == 1) {
        img.at(0, y, x) = m.at<std::uint8_t>(y, x) / 255.0f;
      } else if (m.channels() == 4) {
        const auto& px = m.at<cv::Vec4b>(y, x);  // BGRA
        img.at(0, y, x) = px[2] / 255.0f;
        img.at(1, y, x) = px[1] / 255.0f;
        img.at(2, y, x) = px[0] / 255.0f;
      } else {
        const auto& px = m.at<cv::Vec3b>(y, x);  // BGR
        img.at(0, y, x) = px[2] / 255.0f;
        img.at(1, y, x) = px[1] / 255.0f;
        img.at(2, y, x) = px[0] / 255.0f;
      }
    }
  }
  return img;
}

void save_png(const std::string& path, const Image& img) {
  auto to_u8 = [](float v) {
    return static_cast<std::uint8_t>(
        std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
  };
  cv::Mat m;
  if (img.channels == 1) {
    m = cv::Mat(img.height, img.width, CV_8UC1);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        m.at<std::uint8_t>(y, x) = to_u8(img.at(0, y, x));
  } else if (img.channels == 3) {
    m = cv::Mat(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        m.at<cv::Vec3b>(y, x) = cv::Vec3b(to_u8(img.at(2, y, x)),
                                          to_u8(img.at(1, y, x)),
                                          to_u8(img.at(0, y, x)));
  } else {
    throw DataError("save_png: unsupported channel count");
  }
  if (!cv::imwrite(path, m))
    throw DataError("save_png: cannot write " + path);
}

}  // namespace foc
