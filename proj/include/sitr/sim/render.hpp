#pragma once

#include <vector>

#include "sitr/image.hpp"
#include "sitr/sim/scene.hpp"
#include "sitr/sim/sensor.hpp"

namespace sitr::sim {

// Gel indentation field in millimeters above the rest surface, one value per
// pixel. Pixel (row, col) sits at world (x, y) = (-w/2 + (col+0.5)*pitch,
// -w/2 + (row+0.5)*pitch) with w the sensing width.
struct HeightMap {
  int h = 0;
  int w = 0;
  double pixel_pitch_mm = 0.0;
  std::vector<double> values;  // row-major [h][w]

  HeightMap() = default;
  HeightMap(int h_, int w_, double pitch)
      : h(h_), w(w_), pixel_pitch_mm(pitch),
        values(static_cast<std::size_t>(h_) * w_, 0.0) {}
  double& at(int y, int x) { return values[static_cast<std::size_t>(y) * w + x]; }
  double at(int y, int x) const {
    return values[static_cast<std::size_t>(y) * w + x];
  }
};

// Rigid imprint clamped at the press depth, then spread by a Gaussian whose
// width tracks gel stiffness: sigma_px = (6 - 5*stiffness) * (resolution/224).
// The object is lowered until its deepest sampled point reaches press_depth,
// so the pre-smoothing peak equals the press depth exactly; pixels the object
// never covers stay zero. Smoothing is a convex combination per pixel and
// never increases the maximum.
HeightMap imprint(const ContactScene& scene, const SensorConfig& cfg);

// Pre-smoothing imprint field (exposed for geometry checks).
HeightMap imprint_raw(const ContactScene& scene, const SensorConfig& cfg);

// Per-pixel unit surface normals from height differences in physical units:
// n ~ (-dh/dx, -dh/dy, 1), central differences inside, one-sided at borders.
// Returned as a 3-channel float image; n_z > 0 everywhere.
Image normal_from_height(const HeightMap& h);

// Color-independent Blinn-Phong response of each light: for every pixel,
// k_d*max(0, n.w_l) + k_s*max(0, n.half(w_l, v))^alpha with k_d = 0.8,
// k_s = gel_specularity, alpha = 32. Lights sit on the sensing-area
// perimeter (side midpoints or corners), elevated so the ray toward the gel
// center leaves the plane at light_angle_deg; area lights average a fixed
// 16-point sunflower jitter of the given radius. The view ray points at a
// pinhole of height (w/2)/tan(fov/2) above the center.
std::vector<Image> shade_components(const HeightMap& h, const Image& normals,
                                    const SensorConfig& cfg);

// I_c = sum_l color[l][c] * component_l, optionally clamped to [0,1].
// Keeping the color weighting separate from the geometric response makes
// shading exactly linear in the light colors.
Image combine_lights(const std::vector<Image>& components,
                     const std::vector<std::array<double, 3>>& colors,
                     bool clamp = true);

// combine_lights(shade_components(...), cfg.light_colors), clamped.
Image shade(const HeightMap& h, const Image& normals, const SensorConfig& cfg);

// shade() of the all-zero height map.
Image render_background(const SensorConfig& cfg);

// Fixed sensor geometry used for ground-truth normal maps so that geometry
// labels do not depend on which sensor captured the image.
SensorConfig canonical_geometry(int resolution);

}  // namespace sitr::sim
