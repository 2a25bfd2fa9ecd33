#pragma once

#include <array>
#include <string>
#include <vector>

namespace foc {

// Planar CHW float image, values in [0,1].
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int h, int w, int c)
      : height(h), width(w), channels(c),
        data(static_cast<std::size_t>(h) * w * c, 0.0f) {}

  float& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  float at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  std::size_t size() const { return data.size(); }
};

// hue in degrees, s and v in [0,1]; returns rgb in [0,1]
std::array<double, 3> hsv_to_rgb(double hue, double s, double v);
std::array<double, 3> rgb_to_hsv(double r, double g, double b);

// PNG I/O, 8-bit. Grayscale files load as 1 channel, color as 3 (RGB order).
// Pixel values are divided by 255 on load and scaled back on save.
Image load_png(const std::string& path);
void save_png(const std::string& path, const Image& img);

}  // namespace foc
