#include "sitr/model/trainer.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "sitr/log.hpp"
#include "sitr/ng/adam.hpp"

namespace sitr::model {

namespace {
constexpr std::uint64_t kEpochTag = 0x45504f4348ull;  // epoch shuffle stream
constexpr std::uint64_t kBatchTag = 0x4241544348ull;  // view/augment stream
}  // namespace

PretrainResult pretrain_encoder(const data::DatasetManifest& manifest,
                                const PretrainConfig& cfg,
                                EncoderState<float>& st,
                                std::ostream* loss_csv) {
  cfg.weights.validate();
  if (cfg.epochs < 1) throw config_error("epochs must be >= 1");
  if (cfg.contacts_per_batch < 1)
    throw config_error("contacts_per_batch must be >= 1");

  data::DatasetReader reader(manifest, cfg.encoder.image_size,
                             cfg.calib_override);
  if (reader.calib_count() != cfg.encoder.calib_count)
    throw config_error(
        "encoder calib_count " + std::to_string(cfg.encoder.calib_count) +
        " does not match the dataset's " +
        std::to_string(reader.calib_count()) + " calibration slices");
  const int n_contacts = reader.num_contacts();
  const int size = cfg.encoder.image_size;
  const int k = reader.calib_count();

  ng::Adam<float> opt(st.trainable(),
                      ng::AdamConfig<float>{static_cast<float>(cfg.lr)});
  const bool use_normal = cfg.weights.lambda_normal > 0;
  const bool use_scl = cfg.weights.lambda_scl > 0;

  if (loss_csv) *loss_csv << kLossCsvHeader << '\n';

  PretrainResult res;
  std::int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::int64_t> order(static_cast<std::size_t>(n_contacts));
    for (int i = 0; i < n_contacts; ++i) order[static_cast<std::size_t>(i)] = i;
    Rng shuffle_rng(Rng::mix({cfg.seed, kEpochTag,
                              static_cast<std::uint64_t>(epoch)}));
    shuffle_indices(order.data(), n_contacts, shuffle_rng);
    Rng batch_rng(Rng::mix({cfg.seed, kBatchTag,
                            static_cast<std::uint64_t>(epoch)}));

    for (int start = 0; start < n_contacts;
         start += cfg.contacts_per_batch) {
      const int end = std::min(start + cfg.contacts_per_batch, n_contacts);
      std::vector<int> chunk;
      for (int i = start; i < end; ++i)
        chunk.push_back(static_cast<int>(order[static_cast<std::size_t>(i)]));
      data::Batch batch =
          data::make_aligned_batch(reader, chunk, batch_rng, cfg.augment);

      auto images = ng::Tensor<float>::from_vec({batch.b, size, size, 3},
                                                batch.images);
      ng::Tensor<float> calib;
      if (k > 0)
        calib = ng::Tensor<float>::from_vec({batch.b, size, size, 3 * k},
                                            batch.calib_stacks);
      auto targets = ng::Tensor<float>::from_vec({batch.b, size, size, 3},
                                                 batch.normals);
      ++step;
      double v_normal = 0, v_scl = 0, v_total = 0;
      {
        ng::Tape<float> tape;
        auto rep = sitr_representation(images, calib, st);
        ng::Tensor<float> l_normal = ng::Tensor<float>::scalar(0.f);
        ng::Tensor<float> l_scl = ng::Tensor<float>::scalar(0.f);
        if (use_normal)
          l_normal = normal_loss(decode_normal(rep.x_tokens, st), targets);
        if (use_scl)
          l_scl = scl_loss(embed_class(rep.z_out, st), batch.contact_labels,
                           cfg.weights.tau);
        auto total = total_loss(l_normal, l_scl, cfg.weights);
        ng::check_finite(total, "pretrain step " + std::to_string(step));
        v_normal = l_normal.item();
        v_scl = l_scl.item();
        v_total = total.item();
        tape.backward(total);
      }
      opt.step();
      opt.zero_grad();

      if (loss_csv)
        *loss_csv << loss_csv_row(step, v_normal, v_scl, v_total) << '\n';
      if (step == 1) res.first_total = v_total;
      res.last_total = v_total;
      res.last_normal = v_normal;
      res.last_scl = v_scl;
    }
    log::info("pretrain epoch " + std::to_string(epoch + 1) + "/" +
              std::to_string(cfg.epochs) + " total " +
              std::to_string(res.last_total));
  }
  res.steps = step;
  return res;
}

}  // namespace sitr::model
