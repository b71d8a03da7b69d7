#include "sitr/eval/ablate.hpp"

#include <sstream>

#include "sitr/log.hpp"

namespace sitr::eval {

AblationAxis parse_axis(const std::string& name) {
  if (name == "calib") return AblationAxis::kCalib;
  if (name == "tau") return AblationAxis::kTau;
  if (name == "loss") return AblationAxis::kLoss;
  throw config_error("unknown ablation axis '" + name + "'");
}

std::string axis_name(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::kCalib:
      return "calib";
    case AblationAxis::kTau:
      return "tau";
    default:
      return "loss";
  }
}

namespace {

AblationCell run_cell(const data::DatasetManifest& manifest,
                      const std::string& name,
                      const model::PretrainConfig& pretrain,
                      const AblationOptions& opts) {
  log::info("ablation cell " + name);
  model::EncoderState<float> st =
      model::init_encoder<float>(pretrain.encoder, pretrain.seed);
  model::pretrain_encoder(manifest, pretrain, st, nullptr);

  data::DatasetReader reader(manifest, pretrain.encoder.image_size,
                             pretrain.calib_override);
  ContactSplit split = split_contacts(
      static_cast<int>(manifest.contacts.size()), opts.train_frac, opts.seed);
  TransferMatrix m =
      compute_transfer_matrix(reader, st, split, opts.head, opts.threads);
  TransferSummary s = transfer_performance(m);

  AblationCell cell;
  cell.name = name;
  cell.transfer = s.transfer;
  cell.no_transfer = s.no_transfer;
  return cell;
}

void emit(std::ostream* csv, const AblationCell& cell) {
  if (!csv) return;
  (*csv).precision(10);
  (*csv) << cell.name << ',' << cell.transfer << ',' << cell.no_transfer
         << std::endl;
}

}  // namespace

std::vector<AblationCell> ablation_sweep(const data::DatasetManifest& manifest,
                                         AblationAxis axis,
                                         const AblationOptions& opts,
                                         std::ostream* csv) {
  if (csv) (*csv) << "cell,transfer,no_transfer\n";
  std::vector<AblationCell> cells;

  if (axis == AblationAxis::kCalib) {
    for (sim::CalibMode mode :
         {sim::CalibMode::k0, sim::CalibMode::k4, sim::CalibMode::k8,
          sim::CalibMode::k9, sim::CalibMode::k18}) {
      model::PretrainConfig cfg = opts.pretrain;
      cfg.calib_override = mode;
      cfg.encoder.calib_count = sim::calib_k(mode);
      cells.push_back(
          run_cell(manifest, sim::calib_mode_name(mode), cfg, opts));
      emit(csv, cells.back());
    }
    return cells;
  }

  if (axis == AblationAxis::kTau) {
    for (double tau : {0.25, 0.10, 0.07, 0.03, 0.01}) {
      model::PretrainConfig cfg = opts.pretrain;
      cfg.weights.tau = tau;
      std::ostringstream name;
      name << "tau=" << tau;
      cells.push_back(run_cell(manifest, name.str(), cfg, opts));
      emit(csv, cells.back());
    }
    return cells;
  }

  for (const char* variant : {"normal_only", "scl_only", "both"}) {
    model::PretrainConfig cfg = opts.pretrain;
    if (std::string(variant) == "normal_only") cfg.weights.lambda_scl = 0.0;
    if (std::string(variant) == "scl_only") cfg.weights.lambda_normal = 0.0;
    cells.push_back(run_cell(manifest, variant, cfg, opts));
    emit(csv, cells.back());
  }
  return cells;
}

}  // namespace sitr::eval
