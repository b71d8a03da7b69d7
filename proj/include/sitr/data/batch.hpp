#pragma once

#include <optional>
#include <vector>

#include "sitr/data/manifest.hpp"
#include "sitr/data/preprocess.hpp"
#include "sitr/rng.hpp"
#include "sitr/sim/calibration.hpp"

namespace sitr::data {

// One training/eval batch. All image tensors are row-major float.
struct Batch {
  int b = 0, h = 0, w = 0, k = 0;
  std::vector<float> images;        // [b][h][w][3]
  std::vector<float> calib_stacks;  // [b][h][w][k*3], slice k at channel 3k
  std::vector<float> normals;       // [b][h][w][3]
  std::vector<int> contact_labels;  // manifest contact indices
  std::vector<int> sensor_ids;      // manifest sensor indices
};

// Serves preprocessed samples from a generated dataset. Backgrounds,
// calibration stacks, and normal maps are cached per sensor/contact;
// tactile images are read and preprocessed on demand. When calib_override
// is set, calibration stacks are re-rendered in memory for that mode (and
// passed through 8-bit quantization so they match the on-disk pipeline
// bit for bit) instead of using the dataset's stored presses.
class DatasetReader {
 public:
  explicit DatasetReader(DatasetManifest manifest, int target_size = 0,
                         std::optional<sim::CalibMode> calib_override = {});

  const DatasetManifest& manifest() const { return manifest_; }
  int target_size() const { return target_size_; }
  int num_sensors() const { return static_cast<int>(manifest_.sensors.size()); }
  int num_contacts() const {
    return static_cast<int>(manifest_.contacts.size());
  }
  int num_classes() const { return manifest_.num_classes(); }
  int calib_count() const { return static_cast<int>(calib_[0].size()); }

  // Preprocessed (background-subtracted, normalized, resized) signal.
  Image signal(int sensor_idx, int contact_idx) const;
  // Preprocessed calibration slices of one sensor.
  const std::vector<Image>& calib_stack(int sensor_idx) const;
  // Sensor-independent ground-truth normal map at the target size.
  const Image& normal_map(int contact_idx) const;

 private:
  DatasetManifest manifest_;
  int target_size_;
  std::vector<Image> backgrounds_;            // raw floats per sensor
  std::vector<std::vector<Image>> calib_;     // preprocessed, per sensor
  std::vector<Image> normals_;                // per contact
};

// Two views of every requested contact from two distinct, uniformly drawn
// sensors; each view carries its own sensor's calibration stack. Labels are
// manifest contact indices. With augment=true one augmentation draw per
// view is shared by the view's tactile signal and calibration slices.
Batch make_aligned_batch(const DatasetReader& reader,
                         const std::vector<int>& contact_indices, Rng& rng,
                         bool augment = false);

}  // namespace sitr::data
