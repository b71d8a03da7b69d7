#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sitr/sim/sensor.hpp"

namespace sitr::data {

struct ManifestSensor {
  std::string sensor_id;
  sim::SensorConfig config;
  std::vector<std::string> calibration_paths;  // relative to the dataset root
  std::string background_path;
};

struct ManifestContact {
  std::string contact_id;
  std::string primitive;              // e.g. "sphere"
  std::vector<double> params;         // primitive parameters, mm
  int class_label = 0;                // index of the primitive kind
  std::array<double, 3> pose_mm{};    // tx, ty, press depth
};

struct ManifestSample {
  std::string sensor_id;
  std::string contact_id;
  std::string image_path;
  std::string normal_path;
};

// Single source of truth for a generated dataset: which sensors exist, which
// contacts were pressed, where every rendered file lives, and the channel
// statistics of the background-subtracted training images.
struct DatasetManifest {
  int version = 1;
  std::uint64_t global_seed = 0;
  bool sensor_aligned = false;
  std::vector<ManifestSensor> sensors;
  std::vector<ManifestContact> contacts;
  std::vector<ManifestSample> samples;
  std::array<double, 3> mean{};
  std::array<double, 3> stddev{};

  std::string root_dir;  // where the manifest was loaded from; not serialized

  int sensor_index(const std::string& sensor_id) const;    // -1 when absent
  int contact_index(const std::string& contact_id) const;  // -1 when absent
  const ManifestSample* find_sample(const std::string& sensor_id,
                                    const std::string& contact_id) const;
  int num_classes() const;

  // Checks id uniqueness, referential integrity of samples, the aligned
  // completeness promise, and (optionally) that every referenced file
  // exists under root_dir.
  void validate(bool check_paths = false) const;

  // Keeps only the listed sensors and their samples; contacts and stats are
  // shared with the source dataset.
  DatasetManifest restrict_to_sensors(
      const std::vector<std::string>& sensor_ids) const;

  std::string to_json() const;
  static DatasetManifest from_json(const std::string& text);

  void save(const std::string& path) const;
  static DatasetManifest load(const std::string& path);  // sets root_dir
};

}  // namespace sitr::data
