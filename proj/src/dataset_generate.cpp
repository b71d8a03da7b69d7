#include "sitr/data/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

#include "json.hpp"
#include "sitr/errors.hpp"
#include "sitr/log.hpp"
#include "sitr/png_io.hpp"
#include "sitr/rng.hpp"
#include "sitr/sim/render.hpp"
#include "sitr/tnsr.hpp"

namespace sitr::data {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kContactTag = 0x434f4e54414354ull;  // draw-stream tag

constexpr sim::PrimitiveKind kKinds[] = {
    sim::PrimitiveKind::kSphere,   sim::PrimitiveKind::kCubeCorner,
    sim::PrimitiveKind::kCylinder, sim::PrimitiveKind::kCone,
    sim::PrimitiveKind::kCapsule,  sim::PrimitiveKind::kTorusArc,
};

std::string format_id(const char* prefix, int width, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, index);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << text;
  if (!out) throw io_error("failed writing " + path.string());
}

// Runs fn(job) for every job index on `threads` workers; any exception is
// rethrown on the calling thread after all workers join.
void parallel_for(int jobs, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, jobs));
  if (threads == 1) {
    for (int j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int j = next.fetch_add(1); j < jobs; j = next.fetch_add(1)) fn(j);
      } catch (...) {
        errors[t] = std::current_exception();
        next.store(jobs);
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

sim::ContactScene sample_contact(std::uint64_t seed, int index) {
  return sample_contact(
      seed, index, std::vector<sim::PrimitiveKind>(kKinds, kKinds + 6));
}

sim::ContactScene sample_contact(std::uint64_t seed, int index,
                                 const std::vector<sim::PrimitiveKind>& kinds) {
  if (kinds.empty()) throw config_error("empty primitive kind list");
  Rng rng(Rng::mix({seed, kContactTag, static_cast<std::uint64_t>(index)}));
  const sim::PrimitiveKind kind =
      kinds[static_cast<std::size_t>(index) % kinds.size()];
  sim::IndenterDraw draw = sim::sample_indenter(rng, kind);
  sim::PressDraw press = sim::sample_press(rng);
  sim::ContactScene scene;
  scene.contact_id = format_id("contact_", 4, index);
  scene.primitive = draw.primitive;
  scene.rotation = draw.rotation;
  scene.tx_mm = press.tx_mm;
  scene.ty_mm = press.ty_mm;
  scene.press_depth_mm = press.depth_mm;
  return scene;
}

DatasetManifest generate_dataset(const GenerateOptions& opts) {
  if (opts.n_sensors < 2)
    throw config_error("dataset generation needs at least 2 sensors");
  if (opts.n_contacts < 2)
    throw config_error("dataset generation needs at least 2 contacts");
  if (opts.out_dir.empty()) throw config_error("output directory required");
  if (opts.resolution < 8) throw config_error("resolution too small");

  const fs::path root(opts.out_dir);
  std::error_code ec;
  fs::create_directories(root / "sensors", ec);
  fs::create_directories(root / "contacts", ec);
  fs::create_directories(root / "samples", ec);
  if (ec || !fs::is_directory(root / "samples"))
    throw io_error("cannot create dataset directories under " +
                   root.string());

  DatasetManifest m;
  m.version = 1;
  m.global_seed = opts.seed;
  m.sensor_aligned = true;

  // Sensors: config, background, calibration presses.
  std::vector<Image> backgrounds(opts.n_sensors);  // u8-roundtripped floats
  for (int s = 0; s < opts.n_sensors; ++s) {
    sim::SensorConfig cfg =
        sim::sample_sensor_config(opts.seed, s, opts.resolution);
    const fs::path dir = root / "sensors" / cfg.sensor_id;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create " + dir.string());
    write_text(dir / "config.json", cfg.to_json() + "\n");

    sim::CalibrationSet calib =
        sim::make_calibration_set(cfg, opts.calib_mode, opts.seed);
    ManifestSensor ms;
    ms.sensor_id = cfg.sensor_id;
    ms.config = cfg;
    const fs::path rel_dir = fs::path("sensors") / cfg.sensor_id;
    ms.background_path = (rel_dir / "background.png").generic_string();
    write_png_image(root / ms.background_path, calib.background);
    backgrounds[s] = quantize_roundtrip(calib.background);
    for (std::size_t k = 0; k < calib.images.size(); ++k) {
      const std::string name = format_id("calib_", 2, static_cast<int>(k));
      const std::string rel = (rel_dir / (name + ".png")).generic_string();
      write_png_image(root / rel, calib.images[k]);
      ms.calibration_paths.push_back(rel);
    }
    m.sensors.push_back(std::move(ms));
    log::info("generated sensor " + cfg.sensor_id);
  }

  // Contacts: scene metadata plus the sensor-independent normal map, which
  // is rendered once under the canonical geometry and shared by every
  // sensor's sample of that contact.
  const sim::SensorConfig canon = sim::canonical_geometry(opts.resolution);
  std::vector<sim::PrimitiveKind> kinds;
  if (opts.classes.empty()) {
    kinds.assign(kKinds, kKinds + 6);
  } else {
    for (const auto& name : opts.classes) {
      const sim::PrimitiveKind k = sim::primitive_kind_from_name(name);
      if (std::find(kinds.begin(), kinds.end(), k) != kinds.end())
        throw config_error("duplicate primitive class " + name);
      kinds.push_back(k);
    }
  }
  std::vector<sim::ContactScene> scenes(opts.n_contacts);
  std::vector<std::vector<float>> normals(opts.n_contacts);
  parallel_for(opts.n_contacts, opts.threads, [&](int c) {
    sim::ContactScene scene = sample_contact(opts.seed, c, kinds);
    sim::HeightMap hm = sim::imprint(scene, canon);
    Image n = sim::normal_from_height(hm);
    normals[c].assign(n.px.begin(), n.px.end());
    scenes[c] = std::move(scene);
  });
  for (int c = 0; c < opts.n_contacts; ++c) {
    const sim::ContactScene& scene = scenes[c];
    ManifestContact mc;
    mc.contact_id = scene.contact_id;
    mc.primitive = sim::primitive_kind_name(scene.primitive.kind);
    mc.params = {scene.primitive.a};
    if (sim::primitive_param_count(scene.primitive.kind) == 2)
      mc.params.push_back(scene.primitive.b);
    mc.class_label = static_cast<int>(scene.primitive.kind);
    mc.pose_mm = {scene.tx_mm, scene.ty_mm, scene.press_depth_mm};
    m.contacts.push_back(mc);

    const fs::path dir = root / "contacts" / scene.contact_id;
    fs::create_directories(dir, ec);
    ordered_json js;
    js["contact_id"] = scene.contact_id;
    js["object"] = sim::object_spec_string(scene.primitive);
    js["rotation"] = scene.rotation;
    js["translation_mm"] = {scene.tx_mm, scene.ty_mm};
    js["press_depth_mm"] = scene.press_depth_mm;
    js["class_label"] = mc.class_label;
    write_text(dir / "scene.json", js.dump(2) + "\n");
  }

  // Samples: every contact under every sensor; one job each. Channel sums
  // are collected per job and reduced in job order so stats do not depend
  // on scheduling.
  const int jobs = opts.n_sensors * opts.n_contacts;
  const std::vector<std::uint32_t> ndims = {
      static_cast<std::uint32_t>(opts.resolution),
      static_cast<std::uint32_t>(opts.resolution), 3u};
  std::vector<std::array<double, 6>> sums(jobs, {0, 0, 0, 0, 0, 0});
  for (int s = 0; s < opts.n_sensors; ++s) {
    fs::create_directories(root / "samples" / m.sensors[s].sensor_id, ec);
    if (ec) throw io_error("cannot create sample directory");
  }
  std::vector<ManifestSample> samples(jobs);
  parallel_for(jobs, opts.threads, [&](int j) {
    const int s = j / opts.n_contacts;
    const int c = j % opts.n_contacts;
    const sim::SensorConfig& cfg = m.sensors[s].config;
    sim::HeightMap hm = sim::imprint(scenes[c], cfg);
    Image img = sim::shade(hm, sim::normal_from_height(hm), cfg);

    const fs::path rel_base =
        fs::path("samples") / cfg.sensor_id / scenes[c].contact_id;
    ManifestSample sample;
    sample.sensor_id = cfg.sensor_id;
    sample.contact_id = scenes[c].contact_id;
    sample.image_path = (rel_base.generic_string() + ".png");
    sample.normal_path = (rel_base.generic_string() + ".tnsr");
    write_png_image(root / sample.image_path, img);
    write_tnsr_f32(root / sample.normal_path, ndims, normals[c]);
    samples[j] = std::move(sample);

    const Image seen = quantize_roundtrip(img);
    auto& acc = sums[j];
    for (int y = 0; y < seen.h; ++y)
      for (int x = 0; x < seen.w; ++x)
        for (int ch = 0; ch < 3; ++ch) {
          const double v = static_cast<double>(seen.at(y, x, ch)) -
                           backgrounds[s].at(y, x, ch);
          acc[ch] += v;
          acc[3 + ch] += v * v;
        }
  });
  m.samples = std::move(samples);

  const double count = static_cast<double>(jobs) * opts.resolution *
                       opts.resolution;
  std::array<double, 3> total{}, total_sq{};
  for (const auto& acc : sums)
    for (int ch = 0; ch < 3; ++ch) {
      total[ch] += acc[ch];
      total_sq[ch] += acc[3 + ch];
    }
  for (int ch = 0; ch < 3; ++ch) {
    m.mean[ch] = total[ch] / count;
    const double var = total_sq[ch] / count - m.mean[ch] * m.mean[ch];
    m.stddev[ch] = std::sqrt(std::max(var, 1e-12));
  }

  m.validate(/*check_paths=*/false);
  m.save((root / "manifest.json").string());
  m.root_dir = root.string();
  log::info("dataset written to " + root.string());
  return m;
}

}  // namespace sitr::data
