#include "sitr/sim/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sitr/errors.hpp"

namespace sitr::sim {

namespace {

inline double pixel_coord(int idx, double pitch, double width) {
  return -width / 2 + (idx + 0.5) * pitch;
}

struct LightPos {
  double x, y, z;
};

std::vector<LightPos> light_positions(const SensorConfig& cfg) {
  const double hw = cfg.sensing_width_mm() / 2;
  std::array<std::array<double, 2>, 4> ring;
  if (cfg.light_orientation == LightOrientation::kSides)
    ring = {{{0, -hw}, {hw, 0}, {0, hw}, {-hw, 0}}};
  else
    ring = {{{-hw, -hw}, {hw, -hw}, {hw, hw}, {-hw, hw}}};
  const double tan_angle = std::tan(cfg.light_angle_deg * M_PI / 180.0);
  std::vector<LightPos> out;
  out.reserve(cfg.num_lights);
  for (int l = 0; l < cfg.num_lights; ++l) {
    const auto& p = ring[l % 4];
    const double dist = std::hypot(p[0], p[1]);
    out.push_back({p[0], p[1], dist * tan_angle});
  }
  return out;
}

// Fixed sunflower pattern over the unit disc; scaled by the light radius.
std::vector<std::array<double, 2>> jitter_offsets(double radius_mm) {
  constexpr int kJ = 16;
  constexpr double kGoldenAngle = 2.399963229728653;
  std::vector<std::array<double, 2>> out(kJ);
  for (int j = 0; j < kJ; ++j) {
    const double r = radius_mm * std::sqrt((j + 0.5) / kJ);
    const double a = kGoldenAngle * j;
    out[j] = {r * std::cos(a), r * std::sin(a)};
  }
  return out;
}

}  // namespace

HeightMap imprint_raw(const ContactScene& scene, const SensorConfig& cfg) {
  scene.validate();
  const int res = cfg.resolution;
  const double width = cfg.sensing_width_mm();
  HeightMap hm(res, res, cfg.pixel_pitch_mm());
  std::vector<double> lower(static_cast<std::size_t>(res) * res,
                            std::numeric_limits<double>::infinity());
  double zmin = std::numeric_limits<double>::infinity();
  for (int row = 0; row < res; ++row) {
    const double y = pixel_coord(row, hm.pixel_pitch_mm, width);
    for (int col = 0; col < res; ++col) {
      const double x = pixel_coord(col, hm.pixel_pitch_mm, width);
      if (auto z = lower_envelope(scene, x, y)) {
        lower[static_cast<std::size_t>(row) * res + col] = *z;
        zmin = std::min(zmin, *z);
      }
    }
  }
  if (!std::isfinite(zmin)) return hm;  // no contact anywhere: flat gel
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i])) continue;
    hm.values[i] = std::max(0.0, scene.press_depth_mm - (lower[i] - zmin));
  }
  return hm;
}

HeightMap imprint(const ContactScene& scene, const SensorConfig& cfg) {
  HeightMap hm = imprint_raw(scene, cfg);
  const double sigma_px =
      (6.0 - 5.0 * cfg.gel_stiffness) * (cfg.resolution / 224.0);
  hm.values = gaussian_blur_grid(hm.values, hm.h, hm.w, sigma_px);
  return hm;
}

Image normal_from_height(const HeightMap& h) {
  if (h.pixel_pitch_mm <= 0) throw contract_error("pixel pitch must be > 0");
  Image out(h.h, h.w, 3);
  for (int row = 0; row < h.h; ++row) {
    for (int col = 0; col < h.w; ++col) {
      const int c0 = std::max(0, col - 1), c1 = std::min(h.w - 1, col + 1);
      const int r0 = std::max(0, row - 1), r1 = std::min(h.h - 1, row + 1);
      const double dx =
          (h.at(row, c1) - h.at(row, c0)) / ((c1 - c0) * h.pixel_pitch_mm);
      const double dy =
          (h.at(r1, col) - h.at(r0, col)) / ((r1 - r0) * h.pixel_pitch_mm);
      const double inv = 1.0 / std::sqrt(dx * dx + dy * dy + 1.0);
      out.at(row, col, 0) = static_cast<float>(-dx * inv);
      out.at(row, col, 1) = static_cast<float>(-dy * inv);
      out.at(row, col, 2) = static_cast<float>(inv);
    }
  }
  return out;
}

std::vector<Image> shade_components(const HeightMap& h, const Image& normals,
                                    const SensorConfig& cfg) {
  if (normals.h != h.h || normals.w != h.w || normals.c != 3)
    throw shape_error("normal map does not match height map resolution");
  constexpr double kDiffuse = 0.8;
  constexpr double kAlpha = 32.0;
  const double ks = cfg.gel_specularity;
  const double width = cfg.sensing_width_mm();
  const double cam_z =
      (width / 2) / std::tan(cfg.camera_fov_deg * M_PI / 180.0 / 2);

  const auto lights = light_positions(cfg);
  std::vector<std::array<double, 2>> offsets{{0.0, 0.0}};
  if (cfg.light_shape == LightShape::kArea)
    offsets = jitter_offsets(cfg.light_radius_mm);

  std::vector<Image> comps(lights.size(), Image(h.h, h.w, 1));
  for (int row = 0; row < h.h; ++row) {
    const double py = pixel_coord(row, h.pixel_pitch_mm, width);
    for (int col = 0; col < h.w; ++col) {
      const double px = pixel_coord(col, h.pixel_pitch_mm, width);
      const double pz = h.at(row, col);
      const double nx = normals.at(row, col, 0);
      const double ny = normals.at(row, col, 1);
      const double nz = normals.at(row, col, 2);
      double vx = -px, vy = -py, vz = cam_z - pz;
      const double vn = std::sqrt(vx * vx + vy * vy + vz * vz);
      vx /= vn;
      vy /= vn;
      vz /= vn;
      for (std::size_t l = 0; l < lights.size(); ++l) {
        double acc = 0;
        for (const auto& off : offsets) {
          double wx = lights[l].x + off[0] - px;
          double wy = lights[l].y + off[1] - py;
          double wz = lights[l].z - pz;
          const double wn = std::sqrt(wx * wx + wy * wy + wz * wz);
          wx /= wn;
          wy /= wn;
          wz /= wn;
          const double diff = std::max(0.0, nx * wx + ny * wy + nz * wz);
          double hx = wx + vx, hy = wy + vy, hz = wz + vz;
          const double hn = std::sqrt(hx * hx + hy * hy + hz * hz);
          double spec = 0;
          if (hn > 0) {
            const double ndh =
                std::max(0.0, (nx * hx + ny * hy + nz * hz) / hn);
            spec = std::pow(ndh, kAlpha);
          }
          acc += kDiffuse * diff + ks * spec;
        }
        comps[l].at(row, col, 0) =
            static_cast<float>(acc / static_cast<double>(offsets.size()));
      }
    }
  }
  return comps;
}

Image combine_lights(const std::vector<Image>& components,
                     const std::vector<std::array<double, 3>>& colors,
                     bool clamp) {
  if (components.size() != colors.size())
    throw contract_error("one color triple per light component required");
  if (components.empty()) throw contract_error("at least one light required");
  const int h = components[0].h, w = components[0].w;
  Image out(h, w, 3);
  for (int row = 0; row < h; ++row)
    for (int col = 0; col < w; ++col)
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0;
        for (std::size_t l = 0; l < components.size(); ++l)
          acc += colors[l][ch] * components[l].at(row, col, 0);
        out.at(row, col, ch) = static_cast<float>(
            clamp ? std::clamp(acc, 0.0, 1.0) : acc);
      }
  return out;
}

Image shade(const HeightMap& h, const Image& normals,
            const SensorConfig& cfg) {
  return combine_lights(shade_components(h, normals, cfg), cfg.light_colors,
                        /*clamp=*/true);
}

Image render_background(const SensorConfig& cfg) {
  HeightMap flat(cfg.resolution, cfg.resolution, cfg.pixel_pitch_mm());
  return shade(flat, normal_from_height(flat), cfg);
}

SensorConfig canonical_geometry(int resolution) {
  SensorConfig cfg;
  cfg.sensor_id = "canonical";
  cfg.resolution = resolution;
  cfg.sensing_area_cm2 = 4.0;
  cfg.gel_stiffness = 0.5;
  cfg.light_colors = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  return cfg;
}

}  // namespace sitr::sim
