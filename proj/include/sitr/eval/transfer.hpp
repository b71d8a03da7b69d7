#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sitr/data/batch.hpp"
#include "sitr/eval/heads.hpp"
#include "sitr/model/encoder.hpp"

namespace sitr::eval {

// Cross-sensor score grid: a[i*n + j] is the score when the head is trained
// on sensor i and evaluated on sensor j.
struct TransferMatrix {
  std::vector<std::string> sensor_ids;
  std::vector<double> a;
  std::string metric_kind;  // "accuracy" or "rmse"

  int n() const { return static_cast<int>(sensor_ids.size()); }
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n() + j]; }
  double at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * n() + j];
  }
};

struct TransferSummary {
  double transfer = 0.0;      // off-diagonal mean
  double no_transfer = 0.0;   // diagonal mean
  double transfer_std = 0.0;  // population std over off-diagonal cells
  double no_transfer_std = 0.0;
};

// Off-diagonal and diagonal means; n >= 2 required for the transfer mean.
TransferSummary transfer_performance(const TransferMatrix& m);

// Deterministic split by contact id: the first round(train_frac * C) of a
// seeded shuffle train, the rest evaluate.
struct ContactSplit {
  std::vector<int> train;
  std::vector<int> eval;
};
ContactSplit split_contacts(int n_contacts, double train_frac,
                            std::uint64_t seed);

enum class TaskKind { kClassification, kPose };
TaskKind parse_task(const std::string& name);
std::string task_name(TaskKind task);

// Frozen-encoder features of selected contacts on one sensor: the decoded
// normal map and the unit-norm class embedding per sample, plus labels.
struct SensorFeatures {
  int h = 0, w = 0, d = 0;
  std::vector<std::vector<float>> maps;  // per sample, h*w*3
  std::vector<std::vector<float>> emb;   // per sample, d (raw z_out)
  std::vector<int> class_labels;
  std::vector<std::array<double, 3>> pose_mm;
};
SensorFeatures extract_features(const data::DatasetReader& reader,
                                model::EncoderState<float>& encoder,
                                int sensor_idx,
                                const std::vector<int>& contacts);

struct HeadTrainConfig {
  TaskKind task = TaskKind::kClassification;
  int epochs = 10;
  int batch_size = 16;
  double lr = 1e-3;
  std::uint64_t seed = 0;
};

struct TrainedHead {
  TaskKind task = TaskKind::kClassification;
  int n_classes = 0;
  HeadState<float> state;
  double final_train_metric = 0.0;  // accuracy or rmse on its training set
};

// Trains a task head on cached features; the encoder is never touched.
TrainedHead train_head(const SensorFeatures& train_feats, int n_classes,
                       const HeadTrainConfig& cfg);

// Accuracy fraction (classification) or RMSE in mm (pose) on eval features.
double evaluate_head(const TrainedHead& head, const SensorFeatures& feats,
                     std::uint64_t pair_seed);

// Full protocol: one head per sensor on the train split, scored on every
// sensor's eval split. `threads` fans rows out over workers; results do not
// depend on the thread count (feature extraction stays sequential and each
// row is seeded independently).
TransferMatrix compute_transfer_matrix(const data::DatasetReader& reader,
                                       model::EncoderState<float>& encoder,
                                       const ContactSplit& split,
                                       const HeadTrainConfig& cfg,
                                       int threads = 1);

void write_matrix_csv(const std::filesystem::path& path,
                      const TransferMatrix& m);
void write_summary_json(const std::filesystem::path& path,
                        const TransferMatrix& m, const TransferSummary& s,
                        const std::string& task);

// One row per (sensor, contact) sample: ids, class label, and the 128-d
// unit-norm embedding.
void export_embeddings(const std::filesystem::path& path,
                       const data::DatasetReader& reader,
                       model::EncoderState<float>& encoder);

}  // namespace sitr::eval
