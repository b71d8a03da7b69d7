#pragma once

#include <array>

#include "sitr/image.hpp"
#include "sitr/rng.hpp"

namespace sitr::data {

// image - background, channel-wise; shapes must match.
Image subtract_background(const Image& image, const Image& background);

// ((image - background) - mean) / std per channel, bilinearly resized to
// target_size x target_size when the source resolution differs. Subtraction
// happens before resizing, so adding the same constant to image and
// background cancels exactly.
Image preprocess(const Image& image, const Image& background,
                 const std::array<double, 3>& mean,
                 const std::array<double, 3>& stddev, int target_size = 224);

// One augmentation decision, shared by a sample's tactile signal and all of
// its calibration slices (they come from the same physical sensor).
struct AugmentDraw {
  std::array<double, 3> gain{1, 1, 1};
  std::array<double, 3> offset{0, 0, 0};
  double sigma_px = 0;

  bool is_identity() const {
    return gain == std::array<double, 3>{1, 1, 1} &&
           offset == std::array<double, 3>{0, 0, 0} && sigma_px == 0;
  }
};

// gains ~ U(0.9, 1.1), offsets ~ U(-0.02, 0.02) per channel, blur sigma ~
// U(0, 1) px. Draw order: gain rgb, offset rgb, sigma.
AugmentDraw sample_augment(Rng& rng);

// Channel-wise affine jitter followed by Gaussian blur. Works on any image
// whose channel count is a multiple of 3 (stacked rgb slices); channel ch
// uses gain/offset [ch % 3]. The default draw is an exact identity.
Image apply_augment(const Image& image, const AugmentDraw& draw);

}  // namespace sitr::data
