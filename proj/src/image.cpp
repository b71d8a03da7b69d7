#include "sitr/image.hpp"

#include <algorithm>
#include <cmath>

#include "sitr/errors.hpp"

namespace sitr {

Image resize_bilinear(const Image& src, int oh, int ow) {
  if (src.h == oh && src.w == ow) return src;
  if (src.h < 1 || src.w < 1 || oh < 1 || ow < 1)
    throw contract_error("resize_bilinear on empty image");
  Image dst(oh, ow, src.c);
  const double sy = static_cast<double>(src.h) / oh;
  const double sx = static_cast<double>(src.w) / ow;
  for (int y = 0; y < oh; ++y) {
    // Pixel-center alignment.
    double fy = (y + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(src.h - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.h - 1);
    const double wy = fy - y0;
    for (int x = 0; x < ow; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(src.w - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.w - 1);
      const double wx = fx - x0;
      for (int ch = 0; ch < src.c; ++ch) {
        const double top = src.at(y0, x0, ch) * (1 - wx) + src.at(y0, x1, ch) * wx;
        const double bot = src.at(y1, x0, ch) * (1 - wx) + src.at(y1, x1, ch) * wx;
        dst.at(y, x, ch) = static_cast<float>(top * (1 - wy) + bot * wy);
      }
    }
  }
  return dst;
}

namespace {

std::vector<double> gaussian_kernel(double sigma, int* radius_out) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  *radius_out = radius;
  return k;
}

inline int reflect_index(int i, int n) {
  // Symmetric reflection: -1 -> 0, -2 -> 1, n -> n-1.
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

}  // namespace

std::vector<double> gaussian_blur_grid(const std::vector<double>& v, int h,
                                       int w, double sigma) {
  if (sigma <= 0.0) return v;
  int radius = 0;
  const std::vector<double> k = gaussian_kernel(sigma, &radius);
  std::vector<double> tmp(v.size()), out(v.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += k[static_cast<std::size_t>(i + radius)] *
               v[static_cast<std::size_t>(y) * w + reflect_index(x + i, w)];
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += k[static_cast<std::size_t>(i + radius)] *
               tmp[static_cast<std::size_t>(reflect_index(y + i, h)) * w + x];
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  return out;
}

Image gaussian_blur(const Image& src, double sigma) {
  if (sigma <= 0.0) return src;
  int radius = 0;
  const std::vector<double> k = gaussian_kernel(sigma, &radius);
  Image tmp(src.h, src.w, src.c), out(src.h, src.w, src.c);
  for (int y = 0; y < src.h; ++y)
    for (int x = 0; x < src.w; ++x)
      for (int ch = 0; ch < src.c; ++ch) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i)
          acc += k[static_cast<std::size_t>(i + radius)] *
                 src.at(y, reflect_index(x + i, src.w), ch);
        tmp.at(y, x, ch) = static_cast<float>(acc);
      }
  for (int y = 0; y < src.h; ++y)
    for (int x = 0; x < src.w; ++x)
      for (int ch = 0; ch < src.c; ++ch) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i)
          acc += k[static_cast<std::size_t>(i + radius)] *
                 tmp.at(reflect_index(y + i, src.h), x, ch);
        out.at(y, x, ch) = static_cast<float>(acc);
      }
  return out;
}

std::vector<std::uint8_t> quantize_u8(const Image& img) {
  std::vector<std::uint8_t> out(img.px.size());
  for (std::size_t i = 0; i < img.px.size(); ++i) {
    const double v = std::clamp(static_cast<double>(img.px[i]), 0.0, 1.0);
    out[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return out;
}

Image dequantize_u8(const std::uint8_t* bytes, int h, int w, int c) {
  Image img(h, w, c);
  const std::size_t n = img.px.size();
  for (std::size_t i = 0; i < n; ++i)
    img.px[i] = static_cast<float>(bytes[i]) / 255.0f;
  return img;
}

Image quantize_roundtrip(const Image& img) {
  std::vector<std::uint8_t> q = quantize_u8(img);
  return dequantize_u8(q.data(), img.h, img.w, img.c);
}

}  // namespace sitr
