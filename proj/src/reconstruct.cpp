#include "sitr/eval/reconstruct.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "sitr/errors.hpp"

namespace sitr::eval {

namespace {

// FFTW's planner is not thread-safe; execution of a created plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

sim::HeightMap reconstruct_height(const Image& normals,
                                  double pixel_pitch_mm) {
  if (normals.c != 3 || normals.h <= 0 || normals.w <= 0)
    throw shape_error("normal field must be H x W x 3");
  if (pixel_pitch_mm <= 0) throw config_error("pixel pitch must be positive");
  const int h = normals.h, w = normals.w;

  bool any = false;
  for (float v : normals.px)
    if (v != 0.f) {
      any = true;
      break;
    }
  if (!any) throw contract_error("degenerate all-zero normal field");

  // Per-index gradients in mm of height per pixel step.
  std::vector<double> gx(static_cast<std::size_t>(h) * w);
  std::vector<double> gy(gx.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double nx = normals.at(y, x, 0);
      const double ny = normals.at(y, x, 1);
      const double nz = std::max(static_cast<double>(normals.at(y, x, 2)), 0.1);
      gx[static_cast<std::size_t>(y) * w + x] = -nx / nz * pixel_pitch_mm;
      gy[static_cast<std::size_t>(y) * w + x] = -ny / nz * pixel_pitch_mm;
    }

  // Mirror pad: heights extend evenly, so gx is odd across the x seam and
  // gy odd across the y seam.
  const int h2 = 2 * h, w2 = 2 * w;
  const std::size_t n2 = static_cast<std::size_t>(h2) * w2;
  std::vector<fftw_complex> in_x(n2), in_y(n2), fx(n2), fy(n2), zf(n2),
      zout(n2);
  for (int y = 0; y < h2; ++y)
    for (int x = 0; x < w2; ++x) {
      const int sy = y < h ? y : h2 - 1 - y;
      const int sx = x < w ? x : w2 - 1 - x;
      const double sgn_x = x < w ? 1.0 : -1.0;
      const double sgn_y = y < h ? 1.0 : -1.0;
      const std::size_t src = static_cast<std::size_t>(sy) * w + sx;
      const std::size_t dst = static_cast<std::size_t>(y) * w2 + x;
      in_x[dst][0] = sgn_x * gx[src];
      in_x[dst][1] = 0.0;
      in_y[dst][0] = sgn_y * gy[src];
      in_y[dst][1] = 0.0;
    }

  fftw_plan px, py, pz;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    px = fftw_plan_dft_2d(h2, w2, in_x.data(), fx.data(), FFTW_FORWARD,
                          FFTW_ESTIMATE);
    py = fftw_plan_dft_2d(h2, w2, in_y.data(), fy.data(), FFTW_FORWARD,
                          FFTW_ESTIMATE);
    pz = fftw_plan_dft_2d(h2, w2, zf.data(), zout.data(), FFTW_BACKWARD,
                          FFTW_ESTIMATE);
  }
  fftw_execute(px);
  fftw_execute(py);

  // Least squares in frequency space: Z = -i (wx Fx + wy Fy) / (wx^2 + wy^2).
  for (int v = 0; v < h2; ++v) {
    const int fv = v <= h2 / 2 ? v : v - h2;
    const double wy = kTwoPi * fv / h2;
    for (int u = 0; u < w2; ++u) {
      const int fu = u <= w2 / 2 ? u : u - w2;
      const double wx = kTwoPi * fu / w2;
      const std::size_t idx = static_cast<std::size_t>(v) * w2 + u;
      const double denom = wx * wx + wy * wy;
      if (denom == 0.0) {
        zf[idx][0] = 0.0;
        zf[idx][1] = 0.0;
        continue;
      }
      const double re = wx * fx[idx][0] + wy * fy[idx][0];
      const double im = wx * fx[idx][1] + wy * fy[idx][1];
      // -i * (re + i im) = im - i re
      zf[idx][0] = im / denom;
      zf[idx][1] = -re / denom;
    }
  }
  fftw_execute(pz);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(px);
    fftw_destroy_plan(py);
    fftw_destroy_plan(pz);
  }

  sim::HeightMap out;
  out.h = h;
  out.w = w;
  out.pixel_pitch_mm = pixel_pitch_mm;
  out.values.resize(static_cast<std::size_t>(h) * w);
  const double inv_n = 1.0 / static_cast<double>(n2);
  double mean = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double v = zout[static_cast<std::size_t>(y) * w2 + x][0] * inv_n;
      out.values[static_cast<std::size_t>(y) * w + x] = v;
      mean += v;
    }
  mean /= static_cast<double>(h) * w;
  for (auto& v : out.values) v -= mean;
  return out;
}

}  // namespace sitr::eval
