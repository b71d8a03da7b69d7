#include "sitr/eval/transfer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "json.hpp"
#include "sitr/log.hpp"
#include "sitr/ng/adam.hpp"

namespace sitr::eval {

namespace {

constexpr std::uint64_t kSplitTag = 0x53504c4954ull;
constexpr std::uint64_t kHeadTag = 0x48454144ull;
constexpr std::uint64_t kPairTag = 0x50414952ull;
constexpr std::uint64_t kOrderTag = 0x4f52444552ull;

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double pop_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

// Same-class contact pairs for relative pose: deterministic shuffle within
// each class, then consecutive pairing. Returns (first, second) indices into
// the feature arrays.
std::vector<std::pair<int, int>> make_pose_pairs(const SensorFeatures& f,
                                                 std::uint64_t seed) {
  std::vector<std::vector<std::int64_t>> by_class;
  for (std::size_t i = 0; i < f.class_labels.size(); ++i) {
    const int c = f.class_labels[i];
    if (c < 0) throw contract_error("pose pairing needs class labels");
    if (static_cast<std::size_t>(c) >= by_class.size())
      by_class.resize(static_cast<std::size_t>(c) + 1);
    by_class[static_cast<std::size_t>(c)].push_back(
        static_cast<std::int64_t>(i));
  }
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.size() < 2) continue;
    Rng rng(Rng::mix({seed, kPairTag, static_cast<std::uint64_t>(c)}));
    std::vector<std::int64_t> order(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
      order[i] = static_cast<std::int64_t>(i);
    shuffle_indices(order.data(), static_cast<std::int64_t>(order.size()),
                    rng);
    for (std::size_t i = 0; i + 1 < members.size(); i += 2)
      pairs.emplace_back(
          static_cast<int>(members[static_cast<std::size_t>(order[i])]),
          static_cast<int>(members[static_cast<std::size_t>(order[i + 1])]));
  }
  if (pairs.empty())
    throw contract_error(
        "pose task needs at least two presses of one class");
  return pairs;
}

ng::Tensor<float> gather_maps(const SensorFeatures& f,
                              const std::vector<int>& idx) {
  const std::size_t plane = static_cast<std::size_t>(f.h) * f.w * 3;
  std::vector<float> v;
  v.reserve(idx.size() * plane);
  for (int i : idx)
    v.insert(v.end(), f.maps[static_cast<std::size_t>(i)].begin(),
             f.maps[static_cast<std::size_t>(i)].end());
  return ng::Tensor<float>::from_vec(
      {static_cast<std::int64_t>(idx.size()), f.h, f.w, 3}, std::move(v));
}

ng::Tensor<float> gather_emb(const SensorFeatures& f,
                             const std::vector<int>& idx) {
  std::vector<float> v;
  v.reserve(idx.size() * static_cast<std::size_t>(f.d));
  for (int i : idx)
    v.insert(v.end(), f.emb[static_cast<std::size_t>(i)].begin(),
             f.emb[static_cast<std::size_t>(i)].end());
  return ng::Tensor<float>::from_vec(
      {static_cast<std::int64_t>(idx.size()), f.d}, std::move(v));
}

// Channel-stacked map pairs [B, H, W, 6] for the pose head.
ng::Tensor<float> gather_map_pairs(
    const SensorFeatures& f, const std::vector<std::pair<int, int>>& pairs,
    std::size_t begin, std::size_t end) {
  const int h = f.h, w = f.w;
  const std::size_t b = end - begin;
  std::vector<float> v(b * static_cast<std::size_t>(h) * w * 6);
  for (std::size_t p = begin; p < end; ++p) {
    const auto& [ia, ib] = pairs[p];
    const auto& ma = f.maps[static_cast<std::size_t>(ia)];
    const auto& mb = f.maps[static_cast<std::size_t>(ib)];
    float* dst =
        v.data() + (p - begin) * static_cast<std::size_t>(h) * w * 6;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t s = (static_cast<std::size_t>(y) * w + x) * 3;
        const std::size_t d = (static_cast<std::size_t>(y) * w + x) * 6;
        for (int c = 0; c < 3; ++c) {
          dst[d + c] = ma[s + c];
          dst[d + 3 + c] = mb[s + c];
        }
      }
  }
  return ng::Tensor<float>::from_vec(
      {static_cast<std::int64_t>(b), h, w, 6}, std::move(v));
}

ng::Tensor<float> pose_targets(const SensorFeatures& f,
                               const std::vector<std::pair<int, int>>& pairs,
                               std::size_t begin, std::size_t end) {
  std::vector<float> v;
  v.reserve((end - begin) * 3);
  for (std::size_t p = begin; p < end; ++p) {
    const auto& [ia, ib] = pairs[p];
    for (int c = 0; c < 3; ++c)
      v.push_back(static_cast<float>(f.pose_mm[static_cast<std::size_t>(ib)][c] -
                                     f.pose_mm[static_cast<std::size_t>(ia)][c]));
  }
  return ng::Tensor<float>::from_vec(
      {static_cast<std::int64_t>(end - begin), 3}, std::move(v));
}

double pose_rmse(const ng::Tensor<float>& pred,
                 const ng::Tensor<float>& target) {
  auto p = pred.data();
  auto t = target.data();
  double acc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(p[i]) - static_cast<double>(t[i]);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(p.size()));
}

}  // namespace

TransferSummary transfer_performance(const TransferMatrix& m) {
  const int n = m.n();
  if (n < 1 || m.a.size() != static_cast<std::size_t>(n) * n)
    throw shape_error("transfer matrix must be square over its sensor ids");
  if (n < 2)
    throw contract_error("transfer performance needs at least 2 sensors");
  std::vector<double> diag, off;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      (i == j ? diag : off).push_back(m.at(i, j));
  TransferSummary s;
  s.transfer = mean_of(off);
  s.no_transfer = mean_of(diag);
  s.transfer_std = pop_std(off);
  s.no_transfer_std = pop_std(diag);
  return s;
}

ContactSplit split_contacts(int n_contacts, double train_frac,
                            std::uint64_t seed) {
  if (n_contacts < 2) throw config_error("split needs >= 2 contacts");
  if (train_frac <= 0.0 || train_frac >= 1.0)
    throw config_error("train fraction must lie in (0, 1)");
  std::vector<std::int64_t> order(static_cast<std::size_t>(n_contacts));
  for (int i = 0; i < n_contacts; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(Rng::mix({seed, kSplitTag}));
  shuffle_indices(order.data(), n_contacts, rng);
  int n_train = static_cast<int>(
      std::lround(train_frac * static_cast<double>(n_contacts)));
  n_train = std::clamp(n_train, 1, n_contacts - 1);
  ContactSplit split;
  for (int i = 0; i < n_contacts; ++i) {
    if (i < n_train)
      split.train.push_back(static_cast<int>(order[static_cast<std::size_t>(i)]));
    else
      split.eval.push_back(static_cast<int>(order[static_cast<std::size_t>(i)]));
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.eval.begin(), split.eval.end());
  return split;
}

TaskKind parse_task(const std::string& name) {
  if (name == "classification") return TaskKind::kClassification;
  if (name == "pose") return TaskKind::kPose;
  throw config_error("unknown task '" + name + "'");
}

std::string task_name(TaskKind task) {
  return task == TaskKind::kClassification ? "classification" : "pose";
}

SensorFeatures extract_features(const data::DatasetReader& reader,
                                model::EncoderState<float>& encoder,
                                int sensor_idx,
                                const std::vector<int>& contacts) {
  if (contacts.empty()) throw contract_error("empty contact selection");
  const auto& manifest = reader.manifest();
  const int size = reader.target_size();
  const int k = reader.calib_count();
  if (k != encoder.cfg.calib_count)
    throw config_error("encoder and dataset disagree on calibration count");

  SensorFeatures f;
  f.h = f.w = size;
  f.d = encoder.cfg.embed_dim;

  ng::Tensor<float> calib;
  if (k > 0) {
    const Image stacked =
        model::stack_calibration(reader.calib_stack(sensor_idx));
    std::vector<float> v(stacked.px.begin(), stacked.px.end());
    calib = ng::Tensor<float>::from_vec({1, size, size, 3 * k}, std::move(v));
  }

  ng::NoGradGuard<float> guard;
  for (int c : contacts) {
    const Image sig = reader.signal(sensor_idx, c);
    std::vector<float> v(sig.px.begin(), sig.px.end());
    auto img = ng::Tensor<float>::from_vec({1, size, size, 3}, std::move(v));
    auto rep = model::sitr_representation(img, calib, encoder);
    auto nm = model::decode_normal(rep.x_tokens, encoder);
    auto z = rep.z_out;
    f.maps.emplace_back(nm.data().begin(), nm.data().end());
    f.emb.emplace_back(z.data().begin(), z.data().end());
    const auto& contact = manifest.contacts[static_cast<std::size_t>(c)];
    f.class_labels.push_back(contact.class_label);
    f.pose_mm.push_back({contact.pose_mm[0], contact.pose_mm[1],
                         contact.pose_mm[2]});
  }
  return f;
}

TrainedHead train_head(const SensorFeatures& train_feats, int n_classes,
                       const HeadTrainConfig& cfg) {
  if (cfg.epochs < 1) throw config_error("head epochs must be >= 1");
  if (cfg.batch_size < 1) throw config_error("head batch size must be >= 1");
  if (train_feats.maps.empty())
    throw contract_error("empty training feature set");

  TrainedHead head;
  head.task = cfg.task;
  head.n_classes = n_classes;

  const std::uint64_t seed = Rng::mix({cfg.seed, kHeadTag});
  if (cfg.task == TaskKind::kClassification) {
    for (int label : train_feats.class_labels)
      if (label < 0 || label >= n_classes)
        throw contract_error("class label outside [0, n_classes)");
    head.state = init_classifier_head<float>(train_feats.d, n_classes, seed);
    ng::Adam<float> opt(head.state.trainable(),
                        ng::AdamConfig<float>{static_cast<float>(cfg.lr)});
    const int n = static_cast<int>(train_feats.maps.size());
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::vector<std::int64_t> order(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
      Rng rng(Rng::mix({cfg.seed, kOrderTag,
                        static_cast<std::uint64_t>(epoch)}));
      shuffle_indices(order.data(), n, rng);
      for (int start = 0; start < n; start += cfg.batch_size) {
        const int end = std::min(start + cfg.batch_size, n);
        std::vector<int> idx;
        std::vector<int> labels;
        for (int i = start; i < end; ++i) {
          idx.push_back(static_cast<int>(order[static_cast<std::size_t>(i)]));
          labels.push_back(train_feats.class_labels[static_cast<std::size_t>(
              idx.back())]);
        }
        ng::Tape<float> tape;
        auto logits = classifier_forward(gather_maps(train_feats, idx),
                                         gather_emb(train_feats, idx),
                                         head.state);
        auto loss = cross_entropy(logits, labels);
        ng::check_finite(loss, "head step");
        tape.backward(loss);
        opt.step();
        opt.zero_grad();
      }
    }
    // Final training metric, full pass.
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    ng::NoGradGuard<float> guard;
    auto logits = classifier_forward(gather_maps(train_feats, all),
                                     gather_emb(train_feats, all),
                                     head.state);
    head.final_train_metric = accuracy(logits, train_feats.class_labels);
    return head;
  }

  // Pose regression on same-class pairs.
  auto pairs = make_pose_pairs(train_feats, cfg.seed);
  head.state = init_pose_head<float>(seed);
  ng::Adam<float> opt(head.state.trainable(),
                      ng::AdamConfig<float>{static_cast<float>(cfg.lr)});
  const std::size_t n = pairs.size();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(start + static_cast<std::size_t>(cfg.batch_size), n);
      ng::Tape<float> tape;
      auto pred =
          pose_forward(gather_map_pairs(train_feats, pairs, start, end),
                       head.state);
      auto target = pose_targets(train_feats, pairs, start, end);
      auto diff = ng::sub(pred, target);
      auto loss = ng::mean_all(ng::mul(diff, diff));
      ng::check_finite(loss, "head step");
      tape.backward(loss);
      opt.step();
      opt.zero_grad();
    }
  }
  ng::NoGradGuard<float> guard;
  auto pred = pose_forward(gather_map_pairs(train_feats, pairs, 0, n),
                           head.state);
  head.final_train_metric = pose_rmse(pred, pose_targets(train_feats, pairs,
                                                         0, n));
  return head;
}

double evaluate_head(const TrainedHead& head, const SensorFeatures& feats,
                     std::uint64_t pair_seed) {
  if (feats.maps.empty()) throw contract_error("empty evaluation set");
  ng::NoGradGuard<float> guard;
  auto& state = const_cast<HeadState<float>&>(head.state);
  if (head.task == TaskKind::kClassification) {
    const int n = static_cast<int>(feats.maps.size());
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    auto logits = classifier_forward(gather_maps(feats, all),
                                     gather_emb(feats, all), state);
    return accuracy(logits, feats.class_labels);
  }
  auto pairs = make_pose_pairs(feats, pair_seed);
  auto pred =
      pose_forward(gather_map_pairs(feats, pairs, 0, pairs.size()), state);
  return pose_rmse(pred, pose_targets(feats, pairs, 0, pairs.size()));
}

TransferMatrix compute_transfer_matrix(const data::DatasetReader& reader,
                                       model::EncoderState<float>& encoder,
                                       const ContactSplit& split,
                                       const HeadTrainConfig& cfg,
                                       int threads) {
  const int n = reader.num_sensors();
  if (n < 2) throw contract_error("transfer needs at least 2 sensors");
  if (threads < 1) throw config_error("threads must be >= 1");
  const int n_classes = reader.num_classes();

  TransferMatrix m;
  m.metric_kind =
      cfg.task == TaskKind::kClassification ? "accuracy" : "rmse";
  for (const auto& s : reader.manifest().sensors)
    m.sensor_ids.push_back(s.sensor_id);
  m.a.assign(static_cast<std::size_t>(n) * n, 0.0);

  // Features come out sequentially (one shared encoder, one reader);
  // rows only read them afterwards.
  std::vector<SensorFeatures> eval_feats, train_feats;
  eval_feats.reserve(static_cast<std::size_t>(n));
  train_feats.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    eval_feats.push_back(extract_features(reader, encoder, j, split.eval));
  for (int i = 0; i < n; ++i)
    train_feats.push_back(extract_features(reader, encoder, i, split.train));

  auto run_row = [&](int i) {
    TrainedHead head =
        train_head(train_feats[static_cast<std::size_t>(i)], n_classes, cfg);
    for (int j = 0; j < n; ++j)
      m.at(i, j) = evaluate_head(head, eval_feats[static_cast<std::size_t>(j)],
                                 cfg.seed);
    log::info("transfer row " + m.sensor_ids[static_cast<std::size_t>(i)] +
              " done (train metric " +
              std::to_string(head.final_train_metric) + ")");
  };

  const int workers = std::min(threads, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) run_row(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          run_row(i);
      });
    for (auto& t : pool) t.join();
  }
  return m;
}

void write_matrix_csv(const std::filesystem::path& path,
                      const TransferMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << "train_sensor";
  for (const auto& id : m.sensor_ids) out << ',' << id;
  out << '\n';
  out.precision(10);
  for (int i = 0; i < m.n(); ++i) {
    out << m.sensor_ids[static_cast<std::size_t>(i)];
    for (int j = 0; j < m.n(); ++j) out << ',' << m.at(i, j);
    out << '\n';
  }
  if (!out) throw io_error("failed writing " + path.string());
}

void write_summary_json(const std::filesystem::path& path,
                        const TransferMatrix& m, const TransferSummary& s,
                        const std::string& task) {
  nlohmann::ordered_json j;
  j["task"] = task;
  j["metric_kind"] = m.metric_kind;
  j["n_sensors"] = m.n();
  j["transfer"] = s.transfer;
  j["transfer_std"] = s.transfer_std;
  j["no_transfer"] = s.no_transfer;
  j["no_transfer_std"] = s.no_transfer_std;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw io_error("failed writing " + path.string());
}

void export_embeddings(const std::filesystem::path& path,
                       const data::DatasetReader& reader,
                       model::EncoderState<float>& encoder) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << "sensor_id,contact_id,class_label";
  for (int i = 0; i < model::EncoderConfig::kEmbedOut; ++i) out << ",e" << i;
  out << '\n';
  out.precision(9);

  const auto& manifest = reader.manifest();
  const int size = reader.target_size();
  const int k = reader.calib_count();
  ng::NoGradGuard<float> guard;
  for (std::size_t si = 0; si < manifest.sensors.size(); ++si) {
    ng::Tensor<float> calib;
    if (k > 0) {
      const Image stacked = model::stack_calibration(
          reader.calib_stack(static_cast<int>(si)));
      std::vector<float> v(stacked.px.begin(), stacked.px.end());
      calib =
          ng::Tensor<float>::from_vec({1, size, size, 3 * k}, std::move(v));
    }
    for (std::size_t ci = 0; ci < manifest.contacts.size(); ++ci) {
      const Image sig =
          reader.signal(static_cast<int>(si), static_cast<int>(ci));
      std::vector<float> v(sig.px.begin(), sig.px.end());
      auto img =
          ng::Tensor<float>::from_vec({1, size, size, 3}, std::move(v));
      auto rep = model::sitr_representation(img, calib, encoder);
      auto e = model::embed_class(rep.z_out, encoder);
      out << manifest.sensors[si].sensor_id << ','
          << manifest.contacts[ci].contact_id << ','
          << manifest.contacts[ci].class_label;
      for (float x : e.data()) out << ',' << x;
      out << '\n';
    }
  }
  if (!out) throw io_error("failed writing " + path.string());
}

}  // namespace sitr::eval
