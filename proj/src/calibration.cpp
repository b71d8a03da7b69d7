#include "sitr/sim/calibration.hpp"

#include <array>
#include <cmath>

#include "sitr/errors.hpp"
#include "sitr/rng.hpp"
#include "sitr/sim/render.hpp"
#include "sitr/sim/scene.hpp"

namespace sitr::sim {

CalibMode parse_calib_mode(const std::string& name) {
  if (name == "k0") return CalibMode::k0;
  if (name == "k4") return CalibMode::k4;
  if (name == "k8") return CalibMode::k8;
  if (name == "k9") return CalibMode::k9;
  if (name == "k18") return CalibMode::k18;
  throw config_error("calibration mode must be one of k0/k4/k8/k9/k18, got '" +
                     name + "'");
}

const char* calib_mode_name(CalibMode mode) {
  switch (mode) {
    case CalibMode::k0:
      return "k0";
    case CalibMode::k4:
      return "k4";
    case CalibMode::k8:
      return "k8";
    case CalibMode::k9:
      return "k9";
    case CalibMode::k18:
      return "k18";
  }
  throw config_error("unknown calibration mode");
}

int calib_k(CalibMode mode) {
  switch (mode) {
    case CalibMode::k0:
      return 0;
    case CalibMode::k4:
      return 4;
    case CalibMode::k8:
      return 8;
    case CalibMode::k9:
      return 9;
    case CalibMode::k18:
      return 18;
  }
  throw config_error("unknown calibration mode");
}

namespace {

std::vector<std::array<double, 2>> grid_anchors(bool full_grid) {
  std::vector<double> fracs =
      full_grid ? std::vector<double>{0.25, 0.5, 0.75}
                : std::vector<double>{0.25, 0.75};
  std::vector<std::array<double, 2>> anchors;
  for (double fy : fracs)
    for (double fx : fracs) anchors.push_back({fx, fy});
  return anchors;
}

}  // namespace

CalibrationSet make_calibration_set(const SensorConfig& cfg, CalibMode mode,
                                    std::uint64_t rng_seed) {
  cfg.validate();
  CalibrationSet set;
  set.background = render_background(cfg);
  if (mode == CalibMode::k0) return set;

  const bool full_grid = mode == CalibMode::k9 || mode == CalibMode::k18;
  const bool with_cube = mode == CalibMode::k8 || mode == CalibMode::k18;
  const auto anchors = grid_anchors(full_grid);
  const double width = cfg.sensing_width_mm();

  int index = 0;
  auto press = [&](const char* object, const std::array<double, 2>& anchor) {
    Rng jitter(Rng::mix({rng_seed, Rng::hash_str(cfg.sensor_id),
                         static_cast<std::uint64_t>(index)}));
    CalibDescriptor d;
    d.object = object;
    d.grid_x_frac = anchor[0];
    d.grid_y_frac = anchor[1];
    d.jitter_x_mm = jitter.uniform(-0.05 * width, 0.05 * width);
    d.jitter_y_mm = jitter.uniform(-0.05 * width, 0.05 * width);

    ContactScene scene;
    scene.contact_id =
        "calib_" + std::string(object) + "_" + std::to_string(index);
    if (d.object == "ball4mm") {
      scene.primitive = {PrimitiveKind::kSphere, 2.0, 0.0};
    } else {
      scene.primitive = {PrimitiveKind::kCubeCorner, 4.0, 0.0};
    }
    scene.rotation = {0, 0, 0};
    scene.tx_mm = (anchor[0] - 0.5) * width + d.jitter_x_mm;
    scene.ty_mm = (anchor[1] - 0.5) * width + d.jitter_y_mm;
    scene.press_depth_mm = 1.0;

    HeightMap hm = imprint(scene, cfg);
    set.images.push_back(shade(hm, normal_from_height(hm), cfg));
    set.descriptors.push_back(d);
    ++index;
  };

  for (const auto& a : anchors) press("ball4mm", a);
  if (with_cube)
    for (const auto& a : anchors) press("cube_corner", a);
  return set;
}

}  // namespace sitr::sim
