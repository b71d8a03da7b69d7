#include "sitr/sim/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "sitr/errors.hpp"
#include "sitr/rng.hpp"

namespace sitr::sim {

using ordered_json = nlohmann::ordered_json;

double SensorConfig::sensing_width_mm() const {
  return std::sqrt(sensing_area_cm2 * 100.0);  // cm^2 -> mm^2, square side
}

void SensorConfig::validate() const {
  auto bad = [&](const std::string& what) {
    throw config_error("sensor " + sensor_id + ": " + what);
  };
  if (sensor_id.empty()) bad("empty sensor_id");
  if (num_lights < 1) bad("num_lights must be >= 1");
  if (light_shape == LightShape::kArea && light_radius_mm <= 0.0)
    bad("area light needs positive radius");
  if (light_angle_deg < 5.0 || light_angle_deg > 30.0)
    bad("light_angle_deg outside [5, 30]");
  if (static_cast<int>(light_colors.size()) != num_lights)
    bad("light_colors count differs from num_lights");
  for (const auto& c : light_colors)
    for (double v : c)
      if (v < 0.0) bad("negative light color");
  if (gel_stiffness < 0.0 || gel_stiffness > 1.0)
    bad("gel_stiffness outside [0, 1]");
  if (gel_specularity < 0.0 || gel_specularity > 1.0)
    bad("gel_specularity outside [0, 1]");
  if (camera_fov_deg < 40.0 || camera_fov_deg > 90.0)
    bad("camera_fov_deg outside [40, 90]");
  if (sensing_area_cm2 < 4.0 || sensing_area_cm2 > 16.0)
    bad("sensing_area_cm2 outside [4, 16]");
  if (resolution < 8) bad("resolution too small");
}

std::string SensorConfig::to_json() const {
  ordered_json j;
  j["sensor_id"] = sensor_id;
  j["num_lights"] = num_lights;
  ordered_json shape;
  shape["kind"] = light_shape == LightShape::kPoint ? "point" : "area";
  if (light_shape == LightShape::kArea) shape["radius_mm"] = light_radius_mm;
  j["light_shape"] = shape;
  j["light_orientation"] =
      light_orientation == LightOrientation::kSides ? "sides" : "corners";
  j["light_angle_deg"] = light_angle_deg;
  ordered_json colors = ordered_json::array();
  for (const auto& c : light_colors) colors.push_back({c[0], c[1], c[2]});
  j["light_colors"] = colors;
  j["gel_stiffness"] = gel_stiffness;
  j["gel_specularity"] = gel_specularity;
  j["camera_fov_deg"] = camera_fov_deg;
  j["sensing_area_cm2"] = sensing_area_cm2;
  j["resolution"] = resolution;
  return j.dump(2) + "\n";
}

SensorConfig SensorConfig::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw config_error(std::string("bad sensor config json: ") + e.what());
  }
  try {
    SensorConfig cfg;
    cfg.sensor_id = j.at("sensor_id").get<std::string>();
    cfg.num_lights = j.at("num_lights").get<int>();
    const auto& shape = j.at("light_shape");
    const std::string kind = shape.at("kind").get<std::string>();
    if (kind == "point") {
      cfg.light_shape = LightShape::kPoint;
    } else if (kind == "area") {
      cfg.light_shape = LightShape::kArea;
      cfg.light_radius_mm = shape.at("radius_mm").get<double>();
    } else {
      throw config_error("unknown light shape: " + kind);
    }
    const std::string orient = j.at("light_orientation").get<std::string>();
    if (orient == "sides") {
      cfg.light_orientation = LightOrientation::kSides;
    } else if (orient == "corners") {
      cfg.light_orientation = LightOrientation::kCorners;
    } else {
      throw config_error("unknown light orientation: " + orient);
    }
    cfg.light_angle_deg = j.at("light_angle_deg").get<double>();
    for (const auto& c : j.at("light_colors"))
      cfg.light_colors.push_back({c.at(0).get<double>(), c.at(1).get<double>(),
                                  c.at(2).get<double>()});
    cfg.gel_stiffness = j.at("gel_stiffness").get<double>();
    cfg.gel_specularity = j.at("gel_specularity").get<double>();
    cfg.camera_fov_deg = j.at("camera_fov_deg").get<double>();
    cfg.sensing_area_cm2 = j.at("sensing_area_cm2").get<double>();
    cfg.resolution = j.at("resolution").get<int>();
    cfg.validate();
    return cfg;
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error(std::string("bad sensor config field: ") + e.what());
  }
}

SensorConfig sample_sensor_config(std::uint64_t seed, int index,
                                  int resolution) {
  Rng rng(Rng::mix({seed, 0x53454e534fULL, static_cast<std::uint64_t>(index)}));
  SensorConfig cfg;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sensor_%03d", index);
  cfg.sensor_id = buf;
  cfg.num_lights = 3;
  cfg.resolution = resolution;

  // Draw order is part of the determinism contract; do not reorder.
  cfg.light_shape = rng.uniform() < 0.5 ? LightShape::kPoint : LightShape::kArea;
  cfg.light_radius_mm =
      cfg.light_shape == LightShape::kArea ? rng.uniform(0.5, 2.0) : 0.0;
  cfg.light_orientation =
      rng.uniform() < 0.5 ? LightOrientation::kSides : LightOrientation::kCorners;
  cfg.light_angle_deg = rng.uniform(5.0, 30.0);

  // Each light gets a distinct dominant channel: channel roles are a random
  // permutation of (R, G, B) cycled over the lights.
  std::int64_t perm[3] = {0, 1, 2};
  shuffle_indices(perm, 3, rng);
  for (int l = 0; l < cfg.num_lights; ++l) {
    std::array<double, 3> c = {rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0),
                               rng.uniform(0.3, 1.0)};
    int max_i = 0;
    for (int i = 1; i < 3; ++i)
      if (c[i] > c[max_i]) max_i = i;
    const int target = static_cast<int>(perm[l % 3]);
    std::swap(c[max_i], c[target]);
    cfg.light_colors.push_back(c);
  }

  cfg.gel_stiffness = rng.uniform(0.0, 1.0);
  cfg.gel_specularity = rng.uniform(0.0, 1.0);
  cfg.camera_fov_deg = rng.uniform(40.0, 90.0);
  cfg.sensing_area_cm2 = rng.uniform(4.0, 16.0);
  cfg.validate();
  return cfg;
}

}  // namespace sitr::sim
