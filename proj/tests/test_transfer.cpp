#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "sitr/data/dataset.hpp"
#include "sitr/errors.hpp"
#include "sitr/eval/ablate.hpp"
#include "sitr/eval/heads.hpp"
#include "sitr/eval/reconstruct.hpp"
#include "sitr/eval/transfer.hpp"
#include "sitr/model/checkpoint.hpp"
#include "sitr/model/trainer.hpp"
#include "sitr/rng.hpp"
#include "sitr/sim/render.hpp"
#include "sitr/sim/scene.hpp"

using namespace sitr;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

// Micro dataset + encoder sized so a full pretrain runs in milliseconds.
struct MicroSetup {
  data::DatasetManifest manifest;
  model::EncoderConfig encoder;
};

MicroSetup make_micro(const fs::path& dir, int contacts = 6,
                      sim::CalibMode mode = sim::CalibMode::k4) {
  data::GenerateOptions opts;
  opts.n_sensors = 2;
  opts.n_contacts = contacts;
  opts.seed = 41;
  opts.out_dir = dir.string();
  opts.calib_mode = mode;
  opts.resolution = 16;
  MicroSetup s;
  s.manifest = data::generate_dataset(opts);
  s.encoder.image_size = 16;
  s.encoder.patch_size = 8;
  s.encoder.embed_dim = 32;
  s.encoder.depth = 1;
  s.encoder.num_heads = 2;
  s.encoder.calib_count = sim::calib_k(mode);
  return s;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("transfer performance arithmetic") {
  eval::TransferMatrix m;
  m.sensor_ids = {"a", "b"};
  m.metric_kind = "accuracy";
  m.a = {0.9, 0.8, 0.6, 0.7};
  auto s = eval::transfer_performance(m);
  CHECK(s.transfer == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(s.no_transfer == doctest::Approx(0.8).epsilon(1e-15));

  eval::TransferMatrix uni;
  uni.sensor_ids = {"a", "b", "c"};
  uni.a.assign(9, 0.42);
  auto su = eval::transfer_performance(uni);
  CHECK(su.transfer == doctest::Approx(0.42).epsilon(1e-15));
  CHECK(su.no_transfer == doctest::Approx(0.42).epsilon(1e-15));
  CHECK(su.transfer_std == doctest::Approx(0.0));

  eval::TransferMatrix one;
  one.sensor_ids = {"solo"};
  one.a = {1.0};
  CHECK_THROWS_AS(eval::transfer_performance(one), contract_error);
}

TEST_CASE("transfer means match hand computation on random matrices") {
  Rng rng(4242);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(4));
    eval::TransferMatrix m;
    for (int i = 0; i < n; ++i)
      m.sensor_ids.push_back("s" + std::to_string(i));
    m.a.resize(static_cast<std::size_t>(n) * n);
    for (auto& v : m.a) v = rng.uniform(0, 1);

    double diag = 0, off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        (i == j ? diag : off) += m.at(i, j);
    diag /= n;
    off /= static_cast<double>(n) * (n - 1);

    auto s = eval::transfer_performance(m);
    CHECK(std::abs(s.transfer - off) < 1e-12);
    CHECK(std::abs(s.no_transfer - diag) < 1e-12);

    // Simultaneous row/column permutation leaves both scalars unchanged.
    std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    shuffle_indices(perm.data(), n, rng);
    eval::TransferMatrix p = m;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        p.at(i, j) = m.at(static_cast<int>(perm[static_cast<std::size_t>(i)]),
                          static_cast<int>(perm[static_cast<std::size_t>(j)]));
    auto sp = eval::transfer_performance(p);
    CHECK(std::abs(sp.transfer - s.transfer) < 1e-12);
    CHECK(std::abs(sp.no_transfer - s.no_transfer) < 1e-12);
  }
}

TEST_CASE("contact splits are deterministic partitions") {
  auto s1 = eval::split_contacts(10, 0.8, 7);
  auto s2 = eval::split_contacts(10, 0.8, 7);
  CHECK(s1.train == s2.train);
  CHECK(s1.eval == s2.eval);
  CHECK(s1.train.size() == 8);
  CHECK(s1.eval.size() == 2);

  std::set<int> all(s1.train.begin(), s1.train.end());
  all.insert(s1.eval.begin(), s1.eval.end());
  CHECK(all.size() == 10);
  CHECK(*all.begin() == 0);
  CHECK(*all.rbegin() == 9);

  auto s3 = eval::split_contacts(10, 0.8, 8);
  CHECK(s3.train != s1.train);

  auto tiny = eval::split_contacts(2, 0.8, 1);
  CHECK(tiny.train.size() == 1);
  CHECK(tiny.eval.size() == 1);

  CHECK_THROWS_AS(eval::split_contacts(1, 0.8, 0), config_error);
  CHECK_THROWS_AS(eval::split_contacts(10, 1.0, 0), config_error);
  CHECK_THROWS_AS(eval::split_contacts(10, 0.0, 0), config_error);

  CHECK(eval::parse_task("classification") == eval::TaskKind::kClassification);
  CHECK(eval::parse_task("pose") == eval::TaskKind::kPose);
  CHECK_THROWS_AS(eval::parse_task("segmentation"), config_error);
}

TEST_CASE("height integration: flat, ramp, and sphere-cap roundtrip") {
  // Constant upward normals integrate to a flat zero field.
  Image flat(24, 24, 3);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x) flat.at(y, x, 2) = 1.f;
  auto h0 = eval::reconstruct_height(flat, 0.1);
  for (double v : h0.values) CHECK(std::abs(v) < 1e-9);

  // Ramp h = a * x_phys: slope recovered within 2% in the interior.
  const double a = 0.35, pitch = 0.08;
  const int n = 48;
  Image ramp(n, n, 3);
  const double inv = 1.0 / std::sqrt(1.0 + a * a);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      ramp.at(y, x, 0) = static_cast<float>(-a * inv);
      ramp.at(y, x, 2) = static_cast<float>(inv);
    }
  auto hr = eval::reconstruct_height(ramp, pitch);
  const int y0 = n / 2;
  double got = 0;
  int cnt = 0;
  for (int x = n / 4; x < 3 * n / 4; ++x) {
    got += hr.at(y0, x + 1) - hr.at(y0, x);
    ++cnt;
  }
  got /= cnt;
  CHECK(got == doctest::Approx(a * pitch).epsilon(0.02));

  // Simulated sphere cap: integrate its own normal field back.
  sim::ContactScene scene;
  scene.contact_id = "cap";
  scene.primitive.kind = sim::PrimitiveKind::kSphere;
  scene.primitive.a = 3.0;
  scene.press_depth_mm = 0.8;
  sim::SensorConfig cfg = sim::canonical_geometry(64);
  sim::HeightMap truth = sim::imprint(scene, cfg);
  Image normals = sim::normal_from_height(truth);
  auto rec = eval::reconstruct_height(normals, truth.pixel_pitch_mm);
  std::vector<double> tv, rv;
  const int margin = static_cast<int>(std::ceil(0.05 * 64));
  for (int y = margin; y < 64 - margin; ++y)
    for (int x = margin; x < 64 - margin; ++x) {
      tv.push_back(truth.at(y, x));
      rv.push_back(rec.at(y, x));
    }
  CHECK(pearson(tv, rv) >= 0.99);

  Image zero(8, 8, 3);
  CHECK_THROWS_AS(eval::reconstruct_height(zero, 0.1), contract_error);
  Image wrong(8, 8, 1);
  CHECK_THROWS_AS(eval::reconstruct_height(wrong, 0.1), shape_error);
}

TEST_CASE("classifier head: shapes, cross-entropy oracle, degenerate fit") {
  auto st = eval::init_classifier_head<double>(8, 5, 3);
  Rng rng(9);
  std::vector<double> mv(3 * 16 * 16 * 3);
  for (auto& v : mv) v = rng.uniform(-1, 1);
  std::vector<double> zv(3 * 8);
  for (auto& v : zv) v = rng.uniform(-1, 1);
  auto maps = ng::Tensor<double>::from_vec({3, 16, 16, 3}, mv);
  auto z = ng::Tensor<double>::from_vec({3, 8}, zv);
  auto logits = eval::classifier_forward(maps, z, st);
  CHECK(logits.dims() == ng::Dims{3, 5});

  // Uniform logits cost exactly ln(n).
  auto flat = ng::Tensor<double>::zeros({4, 5});
  CHECK(eval::cross_entropy(flat, {0, 1, 2, 3}).item() ==
        doctest::Approx(std::log(5.0)).epsilon(1e-12));

  // Hand-computed reference on a random batch.
  std::vector<double> lv(2 * 3);
  for (auto& v : lv) v = rng.uniform(-2, 2);
  std::vector<int> labels = {2, 0};
  double ref = 0;
  for (int i = 0; i < 2; ++i) {
    double mx = std::max({lv[i * 3], lv[i * 3 + 1], lv[i * 3 + 2]});
    double acc = 0;
    for (int j = 0; j < 3; ++j) acc += std::exp(lv[i * 3 + j] - mx);
    ref += mx + std::log(acc) - lv[i * 3 + labels[i]];
  }
  ref /= 2;
  auto lt = ng::Tensor<double>::from_vec({2, 3}, lv);
  CHECK(eval::cross_entropy(lt, labels).item() ==
        doctest::Approx(ref).epsilon(1e-12));
  CHECK_THROWS_AS(eval::cross_entropy(lt, {0, 3}), contract_error);

  // Accuracy counts argmax hits; ties resolve to the lowest index.
  auto pred = ng::Tensor<double>::from_vec(
      {3, 2}, std::vector<double>{2, 1, 0, 5, 3, 4});
  CHECK(eval::accuracy(pred, {0, 1, 0}) == doctest::Approx(2.0 / 3.0));
  auto tie = ng::Tensor<double>::from_vec({1, 2}, std::vector<double>{3, 3});
  CHECK(eval::accuracy(tie, {0}) == doctest::Approx(1.0));
  CHECK(eval::accuracy(tie, {1}) == doctest::Approx(0.0));

  // One-class task fits immediately.
  eval::SensorFeatures f;
  f.h = f.w = 8;
  f.d = 4;
  for (int i = 0; i < 4; ++i) {
    std::vector<float> map(8 * 8 * 3);
    for (auto& v : map) v = static_cast<float>(rng.uniform(-1, 1));
    f.maps.push_back(map);
    f.emb.push_back({0.5f, -0.25f, 0.f, 1.f});
    f.class_labels.push_back(0);
    f.pose_mm.push_back({0, 0, 0});
  }
  eval::HeadTrainConfig cfg;
  cfg.task = eval::TaskKind::kClassification;
  cfg.epochs = 1;
  cfg.seed = 5;
  auto head = eval::train_head(f, 1, cfg);
  CHECK(head.final_train_metric == 1.0);
  CHECK(eval::evaluate_head(head, f, 0) == 1.0);
}

TEST_CASE("small classification set is memorized within 30 epochs") {
  Rng rng(17);
  eval::SensorFeatures f;
  f.h = f.w = 16;
  f.d = 8;
  for (int i = 0; i < 12; ++i) {
    std::vector<float> map(16 * 16 * 3);
    for (auto& v : map) v = static_cast<float>(rng.uniform(-1, 1));
    f.maps.push_back(map);
    std::vector<float> e(8);
    for (auto& v : e) v = static_cast<float>(rng.uniform(-1, 1));
    f.emb.push_back(e);
    f.class_labels.push_back(i % 6);
    f.pose_mm.push_back({0, 0, 0});
  }
  eval::HeadTrainConfig cfg;
  cfg.task = eval::TaskKind::kClassification;
  cfg.epochs = 30;
  cfg.batch_size = 4;
  cfg.lr = 3e-3;
  cfg.seed = 11;
  auto head = eval::train_head(f, 6, cfg);
  CHECK(head.final_train_metric >= 0.9);
}

TEST_CASE("pose head converges to zero on identical pairs") {
  Rng rng(23);
  eval::SensorFeatures f;
  f.h = f.w = 16;
  f.d = 8;
  std::vector<float> shared(16 * 16 * 3);
  for (auto& v : shared) v = static_cast<float>(rng.uniform(-1, 1));
  for (int i = 0; i < 4; ++i) {
    f.maps.push_back(shared);
    f.emb.push_back(std::vector<float>(8, 0.f));
    f.class_labels.push_back(0);
    f.pose_mm.push_back({1.5, -2.0, 0.7});  // identical: differences vanish
  }
  eval::HeadTrainConfig cfg;
  cfg.task = eval::TaskKind::kPose;
  cfg.epochs = 200;
  cfg.batch_size = 2;
  cfg.lr = 1e-2;
  cfg.seed = 3;
  auto head = eval::train_head(f, 1, cfg);
  CHECK(head.final_train_metric < 0.05);
  CHECK(eval::evaluate_head(head, f, 0) < 0.05);

  // Unpairable: four singleton classes.
  eval::SensorFeatures lonely = f;
  lonely.class_labels = {0, 1, 2, 3};
  CHECK_THROWS_AS(eval::train_head(lonely, 4, cfg), contract_error);
}

TEST_CASE("feature extraction freezes the encoder") {
  fs::path dir = scratch_dir("sitr_transfer_micro");
  auto setup = make_micro(dir);
  auto enc = model::init_encoder<float>(setup.encoder, 77);
  const std::string checksum0 = model::state_checksum(enc);

  data::DatasetReader reader(setup.manifest, setup.encoder.image_size);
  std::vector<int> contacts = {0, 1, 2, 3, 4, 5};
  auto feats = eval::extract_features(reader, enc, 0, contacts);
  CHECK(feats.maps.size() == 6);
  CHECK(feats.emb.size() == 6);
  CHECK(feats.h == 16);
  CHECK(feats.d == 32);
  CHECK(feats.maps[0].size() == 16 * 16 * 3);
  for (int i = 0; i < 6; ++i)
    CHECK(feats.class_labels[static_cast<std::size_t>(i)] ==
          setup.manifest.contacts[static_cast<std::size_t>(i)].class_label);

  eval::HeadTrainConfig cfg;
  cfg.epochs = 2;
  cfg.seed = 5;
  auto head = eval::train_head(feats, reader.num_classes(), cfg);
  (void)eval::evaluate_head(head, feats, 0);
  CHECK(model::state_checksum(enc) == checksum0);

  // Determinism: extraction twice gives bitwise-equal features.
  auto again = eval::extract_features(reader, enc, 0, contacts);
  CHECK(again.maps == feats.maps);
  CHECK(again.emb == feats.emb);
  fs::remove_all(dir);
}

TEST_CASE("pretraining runs, logs, decreases, and is deterministic") {
  fs::path dir = scratch_dir("sitr_trainer_micro");
  auto setup = make_micro(dir);

  model::PretrainConfig cfg;
  cfg.encoder = setup.encoder;
  cfg.epochs = 3;
  cfg.contacts_per_batch = 3;
  cfg.lr = 1e-3;
  cfg.seed = 99;
  cfg.weights.tau = 0.07;

  auto st1 = model::init_encoder<float>(setup.encoder, 1);
  std::ostringstream csv1;
  auto res1 = model::pretrain_encoder(setup.manifest, cfg, st1, &csv1);
  CHECK(res1.steps == 6);  // ceil(6/3) * 3 epochs
  CHECK(res1.last_total < res1.first_total);
  CHECK(std::isfinite(res1.last_total));

  std::istringstream lines(csv1.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "step,l_normal,l_scl,total");
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 6);

  // Bitwise determinism of the trained parameters.
  auto st2 = model::init_encoder<float>(setup.encoder, 1);
  auto res2 = model::pretrain_encoder(setup.manifest, cfg, st2, nullptr);
  CHECK(res2.last_total == res1.last_total);
  CHECK(model::state_checksum(st1) == model::state_checksum(st2));

  // Loss-term switches: lambda_scl = 0 leaves the scl column at zero.
  model::PretrainConfig normal_only = cfg;
  normal_only.epochs = 1;
  normal_only.weights.lambda_scl = 0.0;
  auto st3 = model::init_encoder<float>(setup.encoder, 1);
  auto res3 = model::pretrain_encoder(setup.manifest, cfg = normal_only, st3,
                                      nullptr);
  CHECK(res3.last_scl == 0.0);
  CHECK(res3.last_normal > 0.0);

  // Calibration-count mismatch is rejected up front.
  model::PretrainConfig bad = normal_only;
  bad.encoder.calib_count = 9;
  auto st4 = model::init_encoder<float>(bad.encoder, 1);
  CHECK_THROWS_AS(model::pretrain_encoder(setup.manifest, bad, st4, nullptr),
                  config_error);
  fs::remove_all(dir);
}

TEST_CASE("k0 override pretrains without calibration tokens") {
  fs::path dir = scratch_dir("sitr_trainer_k0");
  auto setup = make_micro(dir, 4);

  model::PretrainConfig cfg;
  cfg.encoder = setup.encoder;
  cfg.encoder.calib_count = 0;
  cfg.calib_override = sim::CalibMode::k0;
  cfg.epochs = 1;
  cfg.contacts_per_batch = 2;
  cfg.seed = 7;

  auto st = model::init_encoder<float>(cfg.encoder, 2);
  auto res = model::pretrain_encoder(setup.manifest, cfg, st, nullptr);
  CHECK(res.steps == 2);
  CHECK(std::isfinite(res.last_total));
  fs::remove_all(dir);
}

TEST_CASE("transfer matrix protocol fills every cell deterministically") {
  fs::path dir = scratch_dir("sitr_transfer_matrix");
  auto setup = make_micro(dir);
  auto enc = model::init_encoder<float>(setup.encoder, 31);
  data::DatasetReader reader(setup.manifest, setup.encoder.image_size);

  auto split = eval::split_contacts(reader.num_contacts(), 0.8, 13);
  eval::HeadTrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.seed = 13;
  auto m1 = eval::compute_transfer_matrix(reader, enc, split, cfg);
  CHECK(m1.n() == 2);
  CHECK(m1.metric_kind == "accuracy");
  CHECK(m1.sensor_ids[0] == setup.manifest.sensors[0].sensor_id);
  for (double v : m1.a) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  auto m2 = eval::compute_transfer_matrix(reader, enc, split, cfg);
  CHECK(m1.a == m2.a);

  auto summary = eval::transfer_performance(m1);
  CHECK(summary.transfer ==
        doctest::Approx((m1.at(0, 1) + m1.at(1, 0)) / 2).epsilon(1e-15));

  fs::path mcsv = dir / "transfer_matrix.csv";
  fs::path sjson = dir / "summary.json";
  eval::write_matrix_csv(mcsv, m1);
  eval::write_summary_json(sjson, m1, summary, "classification");
  std::ifstream in(mcsv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "train_sensor," + m1.sensor_ids[0] + "," +
                      m1.sensor_ids[1]);
  int data_rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++data_rows;
  CHECK(data_rows == 2);
  std::ifstream js(sjson);
  std::stringstream buf;
  buf << js.rdbuf();
  CHECK(buf.str().find("\"metric_kind\": \"accuracy\"") != std::string::npos);
  CHECK(buf.str().find("\"transfer\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("embedding export writes one unit-norm row per sample") {
  fs::path dir = scratch_dir("sitr_embed_export");
  auto setup = make_micro(dir, 4);
  auto enc = model::init_encoder<float>(setup.encoder, 5);
  data::DatasetReader reader(setup.manifest, setup.encoder.image_size);

  fs::path csv = dir / "embeddings.csv";
  eval::export_embeddings(csv, reader, enc);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("sensor_id,contact_id,class_label,e0,", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 3 + 128);
    double n2 = 0;
    for (int i = 0; i < 128; ++i) {
      const double v = std::stod(fields[static_cast<std::size_t>(3 + i)]);
      n2 += v * v;
    }
    CHECK(std::sqrt(n2) == doctest::Approx(1.0).epsilon(1e-5));
  }
  CHECK(rows == static_cast<int>(setup.manifest.samples.size()));
  fs::remove_all(dir);
}

TEST_CASE("ablation sweep covers the documented cells") {
  fs::path dir = scratch_dir("sitr_ablate_micro");
  auto setup = make_micro(dir, 4);

  eval::AblationOptions opts;
  opts.pretrain.encoder = setup.encoder;
  opts.pretrain.epochs = 1;
  opts.pretrain.contacts_per_batch = 2;
  opts.pretrain.seed = 3;
  opts.head.epochs = 1;
  opts.head.seed = 3;
  opts.train_frac = 0.8;
  opts.seed = 3;

  std::ostringstream csv;
  auto loss_cells = eval::ablation_sweep(setup.manifest,
                                         eval::AblationAxis::kLoss, opts,
                                         &csv);
  REQUIRE(loss_cells.size() == 3);
  CHECK(loss_cells[0].name == "normal_only");
  CHECK(loss_cells[1].name == "scl_only");
  CHECK(loss_cells[2].name == "both");
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "cell,transfer,no_transfer");

  // The calibration axis re-renders stacks per mode; names in grid order.
  auto calib_cells = eval::ablation_sweep(setup.manifest,
                                          eval::AblationAxis::kCalib, opts,
                                          nullptr);
  REQUIRE(calib_cells.size() == 5);
  CHECK(calib_cells[0].name == "k0");
  CHECK(calib_cells[1].name == "k4");
  CHECK(calib_cells[2].name == "k8");
  CHECK(calib_cells[3].name == "k9");
  CHECK(calib_cells[4].name == "k18");

  // The temperature axis runs the documented five-value grid.
  auto tau_cells = eval::ablation_sweep(setup.manifest,
                                        eval::AblationAxis::kTau, opts,
                                        nullptr);
  REQUIRE(tau_cells.size() == 5);
  CHECK(tau_cells[0].name == "tau=0.25");
  CHECK(tau_cells[1].name == "tau=0.1");
  CHECK(tau_cells[2].name == "tau=0.07");
  CHECK(tau_cells[3].name == "tau=0.03");
  CHECK(tau_cells[4].name == "tau=0.01");

  CHECK(eval::parse_axis("tau") == eval::AblationAxis::kTau);
  CHECK_THROWS_AS(eval::parse_axis("widths"), config_error);
  fs::remove_all(dir);
}
