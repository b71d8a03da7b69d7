#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sitr/image.hpp"
#include "sitr/sim/sensor.hpp"

namespace sitr::sim {

// Number and kind of calibration presses captured for a sensor. kN carries
// N images: k18 = 9 ball + 9 cube over a 3x3 grid, k8 = 4 + 4 over the
// corners, k9/k4 are the ball-only variants, k0 is empty.
enum class CalibMode { k0, k4, k8, k9, k18 };

CalibMode parse_calib_mode(const std::string& name);  // "k0".."k18"
const char* calib_mode_name(CalibMode mode);
int calib_k(CalibMode mode);

// One calibration press: which probe, which grid anchor (fractions of the
// sensing width), and the jitter that was applied to it.
struct CalibDescriptor {
  std::string object;  // "ball4mm" | "cube_corner"
  double grid_x_frac = 0.0;
  double grid_y_frac = 0.0;
  double jitter_x_mm = 0.0;
  double jitter_y_mm = 0.0;
};

struct CalibrationSet {
  std::vector<Image> images;  // raw renders, one per descriptor
  std::vector<CalibDescriptor> descriptors;
  Image background;
};

// Renders the calibration presses for one sensor. Grid anchors sit at
// fractions {0.25, 0.5, 0.75}^2 (3x3) or {0.25, 0.75}^2 (corners) of the
// sensing width; each press is jittered uniformly within +-5% of the width,
// seeded by (rng_seed, sensor_id, press index). Balls are 2 mm radius
// spheres, cubes are 4 mm corner probes, both pressed 1 mm deep.
CalibrationSet make_calibration_set(const SensorConfig& cfg, CalibMode mode,
                                    std::uint64_t rng_seed);

}  // namespace sitr::sim
