#pragma once

#include "foc/image.hpp"
#include "foc/rng.hpp"

namespace foc {

struct AugmentationPolicy {
  double crop_min = 0.6;        // crop scale range, fraction of side length
  double crop_max = 1.0;
  double flip_prob = 0.5;       // horizontal flip
  double brightness = 0.25;     // additive jitter in +-brightness
  double hue_degrees = 18.0;    // hue rotation in +-hue_degrees (3-channel only)
  bool sobel = false;           // applied last; output becomes 2-channel

  bool is_identity() const {
    return crop_min >= 1.0 && flip_prob <= 0.0 && brightness <= 0.0 &&
           (hue_degrees <= 0.0) && !sobel;
  }
};

// Random crop-and-resize, flip, color jitter, then optional sobel. The draw
// order from rng is fixed, so a seed fully determines the output.
Image augment(const Image& image, const AugmentationPolicy& policy, Rng& rng);

// 3x3 sobel gradients of the channel-mean image; 2-channel output.
Image sobel_filter(const Image& image);

// Bilinear crop-and-resize helper, exposed for tests.
Image crop_resize(const Image& image, double top, double left, double crop_h,
                  double crop_w, int out_h, int out_w);

}  // namespace foc
