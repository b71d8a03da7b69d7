#include "sitr/data/batch.hpp"

#include <cmath>
#include <filesystem>

#include "sitr/errors.hpp"
#include "sitr/png_io.hpp"
#include "sitr/tnsr.hpp"

namespace sitr::data {

namespace fs = std::filesystem;

namespace {

// Bilinear resize for normal maps, renormalized back to unit length.
Image resize_normals(const Image& n, int size) {
  if (n.h == size && n.w == size) return n;
  Image out = resize_bilinear(n, size, size);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) {
      const double nx = out.at(y, x, 0), ny = out.at(y, x, 1),
                   nz = out.at(y, x, 2);
      const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
      if (len > 0)
        for (int c = 0; c < 3; ++c)
          out.at(y, x, c) = static_cast<float>(out.at(y, x, c) / len);
    }
  return out;
}

}  // namespace

DatasetReader::DatasetReader(DatasetManifest manifest, int target_size,
                             std::optional<sim::CalibMode> calib_override)
    : manifest_(std::move(manifest)),
      target_size_(target_size > 0 ? target_size
                                   : manifest_.sensors.empty()
                                         ? 224
                                         : manifest_.sensors[0].config.resolution) {
  manifest_.validate(/*check_paths=*/false);
  if (manifest_.sensors.empty())
    throw config_error("dataset has no sensors");
  const fs::path root(manifest_.root_dir);

  backgrounds_.reserve(manifest_.sensors.size());
  calib_.reserve(manifest_.sensors.size());
  for (const auto& s : manifest_.sensors) {
    Image bg = read_png_rgb(root / s.background_path);
    std::vector<Image> slices;
    if (calib_override) {
      sim::CalibrationSet set = sim::make_calibration_set(
          s.config, *calib_override, manifest_.global_seed);
      slices.reserve(set.images.size());
      for (const auto& img : set.images)
        slices.push_back(
            preprocess(quantize_roundtrip(img), bg, manifest_.mean,
                       manifest_.stddev, target_size_));
    } else {
      slices.reserve(s.calibration_paths.size());
      for (const auto& rel : s.calibration_paths)
        slices.push_back(preprocess(read_png_rgb(root / rel), bg,
                                    manifest_.mean, manifest_.stddev,
                                    target_size_));
    }
    calib_.push_back(std::move(slices));
    backgrounds_.push_back(std::move(bg));
  }
  for (std::size_t s = 1; s < calib_.size(); ++s)
    if (calib_[s].size() != calib_[0].size())
      throw contract_error("sensors disagree on calibration count");

  normals_.resize(manifest_.contacts.size());
  for (std::size_t c = 0; c < manifest_.contacts.size(); ++c) {
    const ManifestSample* sample = nullptr;
    for (const auto& s : manifest_.samples)
      if (s.contact_id == manifest_.contacts[c].contact_id) {
        sample = &s;
        break;
      }
    if (!sample)
      throw contract_error("no sample for contact " +
                           manifest_.contacts[c].contact_id);
    TnsrData t = read_tnsr(root / sample->normal_path);
    if (t.dims.size() != 3 || t.dims[2] != 3)
      throw contract_error("normal map must be rank-3 with 3 channels");
    Image n(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]), 3);
    n.px = t.as_f32();
    normals_[c] = resize_normals(n, target_size_);
  }
}

Image DatasetReader::signal(int sensor_idx, int contact_idx) const {
  const auto& sensor = manifest_.sensors.at(sensor_idx);
  const auto& contact = manifest_.contacts.at(contact_idx);
  const ManifestSample* s =
      manifest_.find_sample(sensor.sensor_id, contact.contact_id);
  if (!s)
    throw contract_error("no sample for (" + sensor.sensor_id + ", " +
                         contact.contact_id + ")");
  Image img = read_png_rgb(fs::path(manifest_.root_dir) / s->image_path);
  return preprocess(img, backgrounds_[sensor_idx], manifest_.mean,
                    manifest_.stddev, target_size_);
}

const std::vector<Image>& DatasetReader::calib_stack(int sensor_idx) const {
  return calib_.at(sensor_idx);
}

const Image& DatasetReader::normal_map(int contact_idx) const {
  return normals_.at(contact_idx);
}

Batch make_aligned_batch(const DatasetReader& reader,
                         const std::vector<int>& contact_indices, Rng& rng,
                         bool augment) {
  const int n_sensors = reader.num_sensors();
  if (n_sensors < 2)
    throw config_error("aligned batches need at least 2 sensors");
  if (!reader.manifest().sensor_aligned)
    throw contract_error("aligned batches require a sensor-aligned dataset");
  if (contact_indices.empty())
    throw config_error("empty contact list for batch");

  const int size = reader.target_size();
  const int k = reader.calib_count();
  Batch batch;
  batch.b = static_cast<int>(contact_indices.size()) * 2;
  batch.h = batch.w = size;
  batch.k = k;
  const std::size_t plane = static_cast<std::size_t>(size) * size;
  batch.images.resize(batch.b * plane * 3);
  batch.calib_stacks.resize(batch.b * plane * k * 3);
  batch.normals.resize(batch.b * plane * 3);
  batch.contact_labels.resize(batch.b);
  batch.sensor_ids.resize(batch.b);

  int row = 0;
  for (int contact : contact_indices) {
    // Two distinct sensors, uniform over unordered pairs.
    const int first = static_cast<int>(rng.below(n_sensors));
    int second = static_cast<int>(rng.below(n_sensors - 1));
    if (second >= first) ++second;
    for (int view : {first, second}) {
      Image signal = reader.signal(view, contact);
      std::vector<Image> calib = reader.calib_stack(view);
      if (augment) {
        const AugmentDraw draw = sample_augment(rng);
        signal = apply_augment(signal, draw);
        for (auto& slice : calib) slice = apply_augment(slice, draw);
      }
      const Image& normal = reader.normal_map(contact);

      float* img_dst = batch.images.data() + row * plane * 3;
      std::copy(signal.px.begin(), signal.px.end(), img_dst);
      float* nrm_dst = batch.normals.data() + row * plane * 3;
      std::copy(normal.px.begin(), normal.px.end(), nrm_dst);
      float* cal_dst = batch.calib_stacks.data() + row * plane * k * 3;
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
          for (int slice = 0; slice < k; ++slice)
            for (int ch = 0; ch < 3; ++ch)
              cal_dst[(static_cast<std::size_t>(y) * size + x) * k * 3 +
                      slice * 3 + ch] = calib[slice].at(y, x, ch);
      batch.contact_labels[row] = contact;
      batch.sensor_ids[row] = view;
      ++row;
    }
  }
  return batch;
}

}  // namespace sitr::data
