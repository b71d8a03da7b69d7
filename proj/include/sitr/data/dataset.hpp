#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sitr/data/manifest.hpp"
#include "sitr/sim/calibration.hpp"
#include "sitr/sim/scene.hpp"

namespace sitr::data {

struct GenerateOptions {
  int n_sensors = 2;
  int n_contacts = 2;
  std::uint64_t seed = 0;
  std::string out_dir;
  sim::CalibMode calib_mode = sim::CalibMode::k18;
  int resolution = 224;
  int threads = 1;
  // Primitive kind names to sample from (round-robin); empty = all six.
  // Class labels always index the full kind list, independent of this set.
  std::vector<std::string> classes;
};

// Renders every contact under every sensor (sensor-aligned), writes the
// on-disk layout (sensors/, contacts/, samples/, manifest.json), and returns
// the manifest with channel stats over the background-subtracted images.
// Deterministic in (seed, options) regardless of thread count.
DatasetManifest generate_dataset(const GenerateOptions& opts);

// The deterministic contact scene drawn for index i under a global seed;
// class label = primitive kind index (round-robin over the six kinds).
sim::ContactScene sample_contact(std::uint64_t seed, int index);

// Same, drawing the kind round-robin from a caller-provided list.
sim::ContactScene sample_contact(std::uint64_t seed, int index,
                                 const std::vector<sim::PrimitiveKind>& kinds);

}  // namespace sitr::data
