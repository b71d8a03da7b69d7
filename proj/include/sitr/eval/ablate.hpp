#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sitr/eval/transfer.hpp"
#include "sitr/model/trainer.hpp"

namespace sitr::eval {

enum class AblationAxis { kCalib, kTau, kLoss };

AblationAxis parse_axis(const std::string& name);
std::string axis_name(AblationAxis axis);

struct AblationCell {
  std::string name;  // e.g. "k18", "tau=0.07", "normal_only"
  double transfer = 0.0;
  double no_transfer = 0.0;
};

struct AblationOptions {
  model::PretrainConfig pretrain;  // base configuration, varied per cell
  HeadTrainConfig head;
  double train_frac = 0.8;
  std::uint64_t seed = 0;
  int threads = 1;  // transfer-matrix row fan-out inside each cell
};

// Pre-trains one encoder per axis cell and scores the transfer protocol.
// Cells: calib {k0,k4,k8,k9,k18}; tau {0.25,0.10,0.07,0.03,0.01};
// loss {normal_only, scl_only, both}. Rows stream to `csv` as they finish.
std::vector<AblationCell> ablation_sweep(const data::DatasetManifest& manifest,
                                         AblationAxis axis,
                                         const AblationOptions& opts,
                                         std::ostream* csv = nullptr);

}  // namespace sitr::eval
