#include "foc/augment.hpp"

#include <algorithm>
#include <cmath>

#include "foc/errors.hpp"

namespace foc {

Image crop_resize(const Image& image, double top, double left, double crop_h,
                  double crop_w, int out_h, int out_w) {
  Image out(out_h, out_w, image.channels);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      // map output pixel center into the crop window
      double sy = top + (y + 0.5) * crop_h / out_h - 0.5;
      double sx = left + (x + 0.5) * crop_w / out_w - 0.5;
      int y0 = static_cast<int>(std::floor(sy));
      int x0 = static_cast<int>(std::floor(sx));
      double fy = sy - y0, fx = sx - x0;
      auto clampy = [&](int v) { return std::clamp(v, 0, image.height - 1); };
      auto clampx = [&](int v) { return std::clamp(v, 0, image.width - 1); };
      int y1 = clampy(y0 + 1), x1 = clampx(x0 + 1);
      y0 = clampy(y0); x0 = clampx(x0);
      for (int c = 0; c < image.channels; ++c) {
        double v = (1 - fy) * ((1 - fx) * image.at(c, y0, x0) +
                               fx * image.at(c, y0, x1)) +
                   fy * ((1 - fx) * image.at(c, y1, x0) +
                         fx * image.at(c, y1, x1));
        out.at(c, y, x) = static_cast<float>(v);
      }
    }
  }
  return out;
}

Image sobel_filter(const Image& image) {
  const int h = image.height, w = image.width;
  Image gray(h, w, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int c = 0; c < image.channels; ++c) acc += image.at(c, y, x);
      gray.at(0, y, x) = acc / image.channels;
    }
  static const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  Image out(h, w, 2);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double gx = 0, gy = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          int yy = std::clamp(y + dy, 0, h - 1);
          int xx = std::clamp(x + dx, 0, w - 1);
          gx += kx[dy + 1][dx + 1] * gray.at(0, yy, xx);
          gy += ky[dy + 1][dx + 1] * gray.at(0, yy, xx);
        }
      }
      out.at(0, y, x) = static_cast<float>(gx / 8.0);  // keep range near [-1,1]
      out.at(1, y, x) = static_cast<float>(gy / 8.0);
    }
  }
  return out;
}

Image augment(const Image& image, const AugmentationPolicy& policy, Rng& rng) {
  if (policy.crop_min <= 0.0 || policy.crop_min > policy.crop_max ||
      policy.crop_max > 1.0)
    throw ConfigError("augment: invalid crop range");

  Image out = image;

  if (policy.crop_min < 1.0 || policy.crop_max < 1.0) {
    double scale = uniform_real(rng, policy.crop_min, policy.crop_max);
    double ch = scale * image.height, cw = scale * image.width;
    double top = uniform_real(rng, 0.0, image.height - ch);
    double left = uniform_real(rng, 0.0, image.width - cw);
    out = crop_resize(out, top, left, ch, cw, image.height, image.width);
  }

  if (policy.flip_prob > 0.0 && uniform_real(rng, 0.0, 1.0) < policy.flip_prob) {
    for (int c = 0; c < out.channels; ++c)
      for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width / 2; ++x)
          std::swap(out.at(c, y, x), out.at(c, y, out.width - 1 - x));
  }

  if (policy.brightness > 0.0) {
    float delta = static_cast<float>(
        uniform_real(rng, -policy.brightness, policy.brightness));
    for (auto& v : out.data) v = std::clamp(v + delta, 0.0f, 1.0f);
  }

  if (policy.hue_degrees > 0.0 && out.channels == 3) {
    double shift = uniform_real(rng, -policy.hue_degrees, policy.hue_degrees);
    for (int y = 0; y < out.height; ++y) {
      for (int x = 0; x < out.width; ++x) {
        auto hsv = rgb_to_hsv(out.at(0, y, x), out.at(1, y, x), out.at(2, y, x));
        auto rgb = hsv_to_rgb(hsv[0] + shift, hsv[1], hsv[2]);
        for (int c = 0; c < 3; ++c) out.at(c, y, x) = static_cast<float>(rgb[c]);
      }
    }
  }

  if (policy.sobel) out = sobel_filter(out);
  return out;
}

}  // namespace foc
