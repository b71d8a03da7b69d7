#pragma once

#include <cstdint>
#include <vector>

namespace sitr {

// Dense float image, row-major [h][w][c].
struct Image {
  int h = 0;
  int w = 0;
  int c = 0;
  std::vector<float> px;

  Image() = default;
  Image(int h_, int w_, int c_, float fill = 0.f)
      : h(h_), w(w_), c(c_), px(static_cast<std::size_t>(h_) * w_ * c_, fill) {}

  float& at(int y, int x, int ch) {
    return px[(static_cast<std::size_t>(y) * w + x) * c + ch];
  }
  float at(int y, int x, int ch) const {
    return px[(static_cast<std::size_t>(y) * w + x) * c + ch];
  }
  std::size_t size() const { return px.size(); }
};

// Bilinear resize to (oh, ow); identity when sizes already match.
Image resize_bilinear(const Image& src, int oh, int ow);

// Separable Gaussian blur with symmetric border reflection; sigma <= 0 is
// identity. Kernel radius is ceil(3*sigma).
Image gaussian_blur(const Image& src, double sigma);

// Same blur over a single-channel double grid (used by the height pipeline).
std::vector<double> gaussian_blur_grid(const std::vector<double>& v, int h,
                                       int w, double sigma);

// Float [0,1] <-> 8-bit conversions; quantization is round-half-away.
std::vector<std::uint8_t> quantize_u8(const Image& img);
Image dequantize_u8(const std::uint8_t* bytes, int h, int w, int c);

// Quantization roundtrip: what the image looks like after a PNG write/read.
Image quantize_roundtrip(const Image& img);

}  // namespace sitr
