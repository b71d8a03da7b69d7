#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace sitr::sim {

enum class LightShape { kPoint, kArea };
enum class LightOrientation { kSides, kCorners };

// Optical/mechanical parameterization of one simulated sensor. Ranged
// fields stay within the sampling bounds enforced by validate().
struct SensorConfig {
  std::string sensor_id;
  int num_lights = 3;
  LightShape light_shape = LightShape::kPoint;
  double light_radius_mm = 0.0;  // area lights only
  LightOrientation light_orientation = LightOrientation::kSides;
  double light_angle_deg = 20.0;
  std::vector<std::array<double, 3>> light_colors;
  double gel_stiffness = 0.5;
  double gel_specularity = 0.5;
  double camera_fov_deg = 60.0;
  double sensing_area_cm2 = 4.0;
  int resolution = 224;

  // Side length of the square sensing area, in mm.
  double sensing_width_mm() const;
  double pixel_pitch_mm() const { return sensing_width_mm() / resolution; }

  void validate() const;  // throws config_error on out-of-range fields

  std::string to_json() const;
  static SensorConfig from_json(const std::string& text);
};

// Draws a config uniformly within the documented parameter bounds;
// deterministic in (seed, index). Field draw order is fixed.
SensorConfig sample_sensor_config(std::uint64_t seed, int index,
                                  int resolution = 224);

}  // namespace sitr::sim
