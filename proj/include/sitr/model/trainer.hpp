#pragma once

#include <cstdint>
#include <optional>
#include <ostream>

#include "sitr/data/batch.hpp"
#include "sitr/model/encoder.hpp"
#include "sitr/model/losses.hpp"

namespace sitr::model {

struct PretrainConfig {
  EncoderConfig encoder;
  int epochs = 6;
  int contacts_per_batch = 8;  // batch carries two views per contact
  double lr = 3e-4;
  LossWeights weights;
  std::uint64_t seed = 0;
  bool augment = true;
  // When set, calibration stacks are re-rendered for this mode instead of
  // using the dataset's stored presses; encoder.calib_count must match.
  std::optional<sim::CalibMode> calib_override;
};

struct PretrainResult {
  std::int64_t steps = 0;
  double first_total = 0.0;
  double last_total = 0.0;
  double last_normal = 0.0;
  double last_scl = 0.0;
};

// Trains `st` in place on aligned two-view batches drawn from the manifest.
// When `loss_csv` is set, writes the per-step log (header + one row/step).
// Throws numeric_error naming the step if the loss goes non-finite.
PretrainResult pretrain_encoder(const data::DatasetManifest& manifest,
                                const PretrainConfig& cfg,
                                EncoderState<float>& st,
                                std::ostream* loss_csv = nullptr);

}  // namespace sitr::model
