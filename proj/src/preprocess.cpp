#include "sitr/data/preprocess.hpp"

#include "sitr/errors.hpp"

namespace sitr::data {

Image subtract_background(const Image& image, const Image& background) {
  if (image.h != background.h || image.w != background.w ||
      image.c != background.c)
    throw shape_error("image and background resolutions differ");
  Image out = image;
  for (std::size_t i = 0; i < out.px.size(); ++i) out.px[i] -= background.px[i];
  return out;
}

Image preprocess(const Image& image, const Image& background,
                 const std::array<double, 3>& mean,
                 const std::array<double, 3>& stddev, int target_size) {
  if (image.c != 3) throw shape_error("preprocess expects rgb images");
  for (double s : stddev)
    if (!(s > 0.0)) throw config_error("channel stddev must be positive");
  Image signal = subtract_background(image, background);
  if (signal.h != target_size || signal.w != target_size)
    signal = resize_bilinear(signal, target_size, target_size);
  for (int y = 0; y < signal.h; ++y)
    for (int x = 0; x < signal.w; ++x)
      for (int ch = 0; ch < 3; ++ch)
        signal.at(y, x, ch) = static_cast<float>(
            (signal.at(y, x, ch) - mean[ch]) / stddev[ch]);
  return signal;
}

AugmentDraw sample_augment(Rng& rng) {
  AugmentDraw d;
  for (int ch = 0; ch < 3; ++ch) d.gain[ch] = rng.uniform(0.9, 1.1);
  for (int ch = 0; ch < 3; ++ch) d.offset[ch] = rng.uniform(-0.02, 0.02);
  d.sigma_px = rng.uniform(0.0, 1.0);
  return d;
}

Image apply_augment(const Image& image, const AugmentDraw& draw) {
  if (image.c % 3 != 0)
    throw shape_error("augmentation expects stacked rgb channels");
  if (draw.is_identity()) return image;
  Image out = image;
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x)
      for (int ch = 0; ch < out.c; ++ch)
        out.at(y, x, ch) = static_cast<float>(
            out.at(y, x, ch) * draw.gain[ch % 3] + draw.offset[ch % 3]);
  return gaussian_blur(out, draw.sigma_px);
}

}  // namespace sitr::data
