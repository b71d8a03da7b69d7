// Command-line front end: dataset generation, encoder pretraining,
// cross-sensor transfer evaluation, single-scene rendering, height
// reconstruction, and ablation sweeps. Exit codes: 2 usage/config,
// 3 IO, 4 numeric, 5 contract violation.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sitr/data/batch.hpp"
#include "sitr/data/dataset.hpp"
#include "sitr/errors.hpp"
#include "sitr/eval/ablate.hpp"
#include "sitr/eval/reconstruct.hpp"
#include "sitr/eval/transfer.hpp"
#include "sitr/image.hpp"
#include "sitr/log.hpp"
#include "sitr/model/checkpoint.hpp"
#include "sitr/model/trainer.hpp"
#include "sitr/png_io.hpp"
#include "sitr/sha256.hpp"
#include "sitr/sim/render.hpp"
#include "sitr/tnsr.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace sitr;

namespace {

const char* level_name(log::Level level) {
  switch (level) {
    case log::Level::kError: return "error";
    case log::Level::kWarn: return "warn";
    case log::Level::kInfo: return "info";
    case log::Level::kDebug: return "debug";
  }
  return "warn";
}

// Every command records its resolved parameters before doing any work, so
// a finished or crashed run can always be reproduced from its directory.
void write_run_config(const fs::path& out_dir, ordered_json params) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw io_error("cannot create output directory " + out_dir.string());
  params["log_level"] = level_name(log::threshold());
  std::ofstream out(out_dir / "run_config.json", std::ios::binary);
  if (!out) throw io_error("cannot write " + (out_dir / "run_config.json").string());
  out << params.dump(2) << '\n';
}

// --data accepts either the dataset directory or the manifest path itself.
data::DatasetManifest load_data(const std::string& data) {
  fs::path p(data);
  if (fs::is_directory(p)) p /= "manifest.json";
  return data::DatasetManifest::load(p.string());
}

sim::CalibMode calib_mode_for_count(int k) {
  switch (k) {
    case 0: return sim::CalibMode::k0;
    case 4: return sim::CalibMode::k4;
    case 8: return sim::CalibMode::k8;
    case 9: return sim::CalibMode::k9;
    case 18: return sim::CalibMode::k18;
    default:
      throw config_error("no calibration mode provides " + std::to_string(k) +
                         " presses");
  }
}

struct GenArgs {
  int sensors = 0;
  int contacts = 0;
  std::uint64_t seed = 0;
  std::string calib = "k18";
  std::string out;
  int resolution = 224;
  int threads = 1;
  std::vector<std::string> classes;
};

int run_gen(const GenArgs& a) {
  ordered_json rc;
  rc["command"] = "gen";
  rc["sensors"] = a.sensors;
  rc["contacts"] = a.contacts;
  rc["global_seed"] = a.seed;
  rc["calib"] = a.calib;
  rc["out_dir"] = a.out;
  rc["resolution"] = a.resolution;
  rc["threads"] = a.threads;
  rc["classes"] = a.classes;
  write_run_config(a.out, rc);

  data::GenerateOptions opts;
  opts.n_sensors = a.sensors;
  opts.n_contacts = a.contacts;
  opts.seed = a.seed;
  opts.out_dir = a.out;
  opts.calib_mode = sim::parse_calib_mode(a.calib);
  opts.resolution = a.resolution;
  opts.threads = a.threads;
  opts.classes = a.classes;
  data::DatasetManifest m = data::generate_dataset(opts);

  std::cout << "dataset written to " << a.out << '\n'
            << "sensors: " << m.sensors.size()
            << "  contacts: " << m.contacts.size()
            << "  samples: " << m.samples.size()
            << "  classes: " << m.num_classes() << '\n'
            << "calibration presses per sensor: "
            << m.sensors.front().calibration_paths.size()
            << "  resolution: " << a.resolution << '\n'
            << "manifest sha256: "
            << sha256_file(fs::path(a.out) / "manifest.json") << '\n';
  return 0;
}

struct PretrainArgs {
  std::string data;
  std::string out;
  int epochs = 6;
  int dim = 128;
  int depth = 4;
  int heads = 4;
  int patch = 8;
  int image = 0;  // 0 = dataset resolution
  double tau = 0.07;
  double lambda_scl = 1.0;
  double lambda_normal = 1.0;
  std::uint64_t seed = 0;
  int batch = 8;
  double lr = 3e-4;
  std::string calib;  // empty = dataset's stored presses
  bool no_augment = false;
};

int run_pretrain(const PretrainArgs& a) {
  data::DatasetManifest manifest = load_data(a.data);

  model::PretrainConfig cfg;
  cfg.encoder.image_size =
      a.image > 0 ? a.image : manifest.sensors.front().config.resolution;
  cfg.encoder.patch_size = a.patch;
  cfg.encoder.embed_dim = a.dim;
  cfg.encoder.depth = a.depth;
  cfg.encoder.num_heads = a.heads;
  if (a.calib.empty()) {
    cfg.encoder.calib_count =
        static_cast<int>(manifest.sensors.front().calibration_paths.size());
  } else {
    cfg.calib_override = sim::parse_calib_mode(a.calib);
    cfg.encoder.calib_count = sim::calib_k(*cfg.calib_override);
  }
  cfg.encoder.validate();
  cfg.epochs = a.epochs;
  cfg.contacts_per_batch = a.batch;
  cfg.lr = a.lr;
  cfg.weights.tau = a.tau;
  cfg.weights.lambda_scl = a.lambda_scl;
  cfg.weights.lambda_normal = a.lambda_normal;
  cfg.weights.validate();
  cfg.seed = a.seed;
  cfg.augment = !a.no_augment;

  ordered_json rc;
  rc["command"] = "pretrain";
  rc["data"] = a.data;
  rc["out_dir"] = a.out;
  rc["epochs"] = a.epochs;
  rc["encoder"] = ordered_json::parse(cfg.encoder.to_json());
  rc["tau"] = a.tau;
  rc["lambda_scl"] = a.lambda_scl;
  rc["lambda_normal"] = a.lambda_normal;
  rc["global_seed"] = a.seed;
  rc["batch_contacts"] = a.batch;
  rc["lr"] = a.lr;
  rc["calib"] = a.calib.empty() ? "dataset" : a.calib;
  rc["augment"] = cfg.augment;
  write_run_config(a.out, rc);

  model::EncoderState<float> st =
      model::init_encoder<float>(cfg.encoder, cfg.seed);
  std::ofstream csv(fs::path(a.out) / "loss.csv", std::ios::binary);
  if (!csv) throw io_error("cannot write loss.csv under " + a.out);
  model::PretrainResult res =
      model::pretrain_encoder(manifest, cfg, st, &csv);

  const fs::path ckpt = fs::path(a.out) / "ckpt";
  model::save_checkpoint(ckpt, st);
  std::cout << "pretrained " << st.num_params() << " parameters for "
            << res.steps << " steps\n"
            << "total loss: " << res.first_total << " -> " << res.last_total
            << '\n'
            << "checkpoint written to " << ckpt.string() << '\n'
            << "checkpoint sha256: " << model::state_checksum(st) << '\n';
  return 0;
}

struct EvalArgs {
  std::string task = "classification";
  std::string data;
  std::string ckpt;
  std::string out;
  int epochs = 10;
  std::uint64_t seed = 0;
  double train_frac = 0.8;
  int batch = 16;
  double lr = 1e-3;
  int threads = 1;
};

int run_eval_transfer(const EvalArgs& a) {
  const eval::TaskKind task = eval::parse_task(a.task);
  data::DatasetManifest manifest = load_data(a.data);
  model::EncoderState<float> st = model::load_checkpoint(a.ckpt);

  ordered_json rc;
  rc["command"] = "eval-transfer";
  rc["task"] = a.task;
  rc["data"] = a.data;
  rc["ckpt"] = a.ckpt;
  rc["out_dir"] = a.out;
  rc["epochs"] = a.epochs;
  rc["global_seed"] = a.seed;
  rc["train_frac"] = a.train_frac;
  rc["batch"] = a.batch;
  rc["lr"] = a.lr;
  rc["threads"] = a.threads;
  write_run_config(a.out, rc);

  const int stored =
      static_cast<int>(manifest.sensors.front().calibration_paths.size());
  std::optional<sim::CalibMode> override;
  if (st.cfg.calib_count != stored)
    override = calib_mode_for_count(st.cfg.calib_count);
  data::DatasetReader reader(manifest, st.cfg.image_size, override);

  eval::ContactSplit split =
      eval::split_contacts(reader.num_contacts(), a.train_frac, a.seed);
  eval::HeadTrainConfig head;
  head.task = task;
  head.epochs = a.epochs;
  head.batch_size = a.batch;
  head.lr = a.lr;
  head.seed = a.seed;
  eval::TransferMatrix m =
      eval::compute_transfer_matrix(reader, st, split, head, a.threads);
  eval::TransferSummary s = eval::transfer_performance(m);

  // Matrix lands on disk before the summary so a crash can never leave a
  // summary without the data it summarizes.
  eval::write_matrix_csv(fs::path(a.out) / "transfer_matrix.csv", m);
  eval::write_summary_json(fs::path(a.out) / "summary.json", m, s, a.task);
  eval::export_embeddings(fs::path(a.out) / "embeddings.csv", reader, st);

  std::cout << "task: " << a.task << "  metric: " << m.metric_kind << '\n'
            << "transfer: " << s.transfer << " (std " << s.transfer_std
            << ")\n"
            << "no_transfer: " << s.no_transfer << " (std "
            << s.no_transfer_std << ")\n"
            << "artifacts written to " << a.out << '\n';
  return 0;
}

struct RenderArgs {
  std::string sensor_config;
  std::string object;
  double depth = 0.5;
  std::string pos = "0,0";
  std::string out;
};

std::pair<double, double> parse_pos(const std::string& pos) {
  std::istringstream is(pos);
  double x = 0, y = 0;
  char comma = 0;
  if (!(is >> x >> comma >> y) || comma != ',' || !(is >> std::ws).eof())
    throw config_error("position must be 'x,y' in mm, got '" + pos + "'");
  return {x, y};
}

int run_render(const RenderArgs& a) {
  std::ifstream in(a.sensor_config, std::ios::binary);
  if (!in) throw io_error("cannot read sensor config " + a.sensor_config);
  std::stringstream buf;
  buf << in.rdbuf();
  sim::SensorConfig cfg = sim::SensorConfig::from_json(buf.str());
  cfg.validate();

  sim::Primitive prim = sim::parse_object_spec(a.object);
  auto [tx, ty] = parse_pos(a.pos);
  if (a.depth < 0.0 || a.depth > 3.0)
    throw config_error("press depth must lie in [0, 3] mm");

  const fs::path prefix(a.out);
  fs::path dir = prefix.parent_path();
  if (dir.empty()) dir = ".";
  ordered_json rc;
  rc["command"] = "render";
  rc["sensor_config"] = a.sensor_config;
  rc["object"] = sim::object_spec_string(prim);
  rc["depth_mm"] = a.depth;
  rc["pos_mm"] = a.pos;
  rc["out_prefix"] = a.out;
  rc["global_seed"] = 0;
  rc["out_dir"] = dir.string();
  write_run_config(dir, rc);

  sim::ContactScene scene;
  scene.contact_id = "render";
  scene.primitive = prim;
  scene.tx_mm = tx;
  scene.ty_mm = ty;
  scene.press_depth_mm = a.depth;

  const int res = cfg.resolution;
  // Depth 0 means "no press": the gel stays flat and the image equals the
  // sensor background, so the subtracted signal is exactly zero.
  sim::HeightMap hm = a.depth > 0.0
                          ? sim::imprint(scene, cfg)
                          : sim::HeightMap(res, res, cfg.pixel_pitch_mm());
  Image normals = sim::normal_from_height(hm);
  Image img = sim::shade(hm, normals, cfg);
  write_png_image(std::string(a.out) + "_image.png", img);

  const sim::SensorConfig canon = sim::canonical_geometry(res);
  sim::HeightMap canon_hm =
      a.depth > 0.0 ? sim::imprint(scene, canon)
                    : sim::HeightMap(res, res, canon.pixel_pitch_mm());
  Image canon_normals = sim::normal_from_height(canon_hm);
  write_tnsr_f32(std::string(a.out) + "_normal.tnsr",
                 {static_cast<std::uint32_t>(res),
                  static_cast<std::uint32_t>(res), 3},
                 std::span<const float>(canon_normals.px.data(),
                                        canon_normals.px.size()));

  Image background = sim::render_background(cfg);
  Image signal(img.h, img.w, img.c);
  for (std::size_t i = 0; i < signal.px.size(); ++i)
    signal.px[i] = (img.px[i] - background.px[i] + 1.0f) * 0.5f;
  write_png_image(std::string(a.out) + "_signal.png", signal);

  std::cout << "wrote " << a.out << "_image.png, " << a.out
            << "_normal.tnsr, " << a.out << "_signal.png\n";
  return 0;
}

struct ReconstructArgs {
  std::string normal;
  double pitch_mm = 0.0;
  std::string out;
};

int run_reconstruct(const ReconstructArgs& a) {
  TnsrData t = read_tnsr(a.normal);
  if (t.dtype != TnsrDtype::kF32 || t.dims.size() != 3 || t.dims[2] != 3 ||
      t.dims[0] == 0 || t.dims[1] == 0)
    throw io_error("malformed normal tensor " + a.normal +
                   " (need f32 with dims [H, W, 3])");
  const int h = static_cast<int>(t.dims[0]);
  const int w = static_cast<int>(t.dims[1]);
  Image normals(h, w, 3);
  std::vector<float> values = t.as_f32();
  std::copy(values.begin(), values.end(), normals.px.begin());

  const fs::path out(a.out);
  fs::path dir = out.parent_path();
  if (dir.empty()) dir = ".";
  ordered_json rc;
  rc["command"] = "reconstruct";
  rc["normal"] = a.normal;
  rc["pitch_mm"] = a.pitch_mm;
  rc["out"] = a.out;
  rc["global_seed"] = 0;
  rc["out_dir"] = dir.string();
  write_run_config(dir, rc);

  sim::HeightMap height = eval::reconstruct_height(normals, a.pitch_mm);

  std::vector<float> hv(height.values.begin(), height.values.end());
  write_tnsr_f32(out,
                 {static_cast<std::uint32_t>(height.h),
                  static_cast<std::uint32_t>(height.w)},
                 hv);

  double lo = height.values[0], hi = height.values[0];
  for (double v : height.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Image preview(height.h, height.w, 1);
  const double span = hi - lo;
  for (std::size_t i = 0; i < preview.px.size(); ++i)
    preview.px[i] = span > 1e-12
                        ? static_cast<float>((height.values[i] - lo) / span)
                        : 0.5f;
  fs::path png = out;
  png.replace_extension(".png");
  write_png_image(png, preview);

  std::cout << "height field " << height.h << "x" << height.w
            << " mm range [" << lo << ", " << hi << "] written to "
            << out.string() << " (preview " << png.string() << ")\n";
  return 0;
}

struct AblateArgs {
  std::string axis;
  std::string data;
  std::string out;
  int epochs = 2;
  int head_epochs = 10;
  int dim = 128;
  int depth = 4;
  int heads = 4;
  int patch = 8;
  int image = 0;
  double tau = 0.07;
  std::uint64_t seed = 0;
  int batch = 8;
  double lr = 3e-4;
  double train_frac = 0.8;
  int threads = 1;
  bool no_augment = false;
};

int run_ablate(const AblateArgs& a) {
  const eval::AblationAxis axis = eval::parse_axis(a.axis);
  data::DatasetManifest manifest = load_data(a.data);

  eval::AblationOptions opts;
  opts.pretrain.encoder.image_size =
      a.image > 0 ? a.image : manifest.sensors.front().config.resolution;
  opts.pretrain.encoder.patch_size = a.patch;
  opts.pretrain.encoder.embed_dim = a.dim;
  opts.pretrain.encoder.depth = a.depth;
  opts.pretrain.encoder.num_heads = a.heads;
  opts.pretrain.encoder.calib_count =
      static_cast<int>(manifest.sensors.front().calibration_paths.size());
  opts.pretrain.encoder.validate();
  opts.pretrain.epochs = a.epochs;
  opts.pretrain.contacts_per_batch = a.batch;
  opts.pretrain.lr = a.lr;
  opts.pretrain.weights.tau = a.tau;
  opts.pretrain.seed = a.seed;
  opts.pretrain.augment = !a.no_augment;
  opts.head.epochs = a.head_epochs;
  opts.head.batch_size = 16;
  opts.head.seed = a.seed;
  opts.train_frac = a.train_frac;
  opts.seed = a.seed;
  opts.threads = a.threads;

  ordered_json rc;
  rc["command"] = "ablate";
  rc["axis"] = a.axis;
  rc["data"] = a.data;
  rc["out_dir"] = a.out;
  rc["epochs"] = a.epochs;
  rc["head_epochs"] = a.head_epochs;
  rc["encoder"] = ordered_json::parse(opts.pretrain.encoder.to_json());
  rc["tau"] = a.tau;
  rc["global_seed"] = a.seed;
  rc["batch_contacts"] = a.batch;
  rc["lr"] = a.lr;
  rc["train_frac"] = a.train_frac;
  rc["threads"] = a.threads;
  rc["augment"] = opts.pretrain.augment;
  write_run_config(a.out, rc);

  std::ofstream csv(fs::path(a.out) / "ablation.csv", std::ios::binary);
  if (!csv) throw io_error("cannot write ablation.csv under " + a.out);
  std::vector<eval::AblationCell> cells =
      eval::ablation_sweep(manifest, axis, opts, &csv);

  for (const auto& c : cells)
    std::cout << c.name << ": transfer " << c.transfer << "  no_transfer "
              << c.no_transfer << '\n';
  std::cout << "rows written to " << (fs::path(a.out) / "ablation.csv").string()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulated tactile sensing pipeline: sensor-aligned dataset "
      "generation, calibration-conditioned encoder pretraining, and "
      "cross-sensor transfer evaluation"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* cg = app.add_subcommand("gen", "Generate a sensor-aligned dataset");
  cg->add_option("--sensors", gen.sensors, "Number of sensors (>= 2)")
      ->required();
  cg->add_option("--contacts", gen.contacts, "Number of contacts (>= 2)")
      ->required();
  cg->add_option("--seed", gen.seed, "Global seed");
  cg->add_option("--calib", gen.calib, "Calibration set: k0|k4|k8|k9|k18");
  cg->add_option("--out", gen.out, "Dataset directory")->required();
  cg->add_option("--resolution", gen.resolution, "Image resolution in pixels");
  cg->add_option("--threads", gen.threads, "Render worker threads");
  cg->add_option("--classes", gen.classes,
                 "Comma-separated primitive kinds to sample")
      ->delimiter(',');

  PretrainArgs pre;
  CLI::App* cp = app.add_subcommand("pretrain", "Pretrain the encoder");
  cp->add_option("--data", pre.data, "Dataset directory or manifest path")
      ->required();
  cp->add_option("--out", pre.out, "Run directory for checkpoint + logs")
      ->required();
  cp->add_option("--epochs", pre.epochs, "Training epochs");
  cp->add_option("--dim", pre.dim, "Embedding dimension");
  cp->add_option("--depth", pre.depth, "Transformer blocks");
  cp->add_option("--heads", pre.heads, "Attention heads");
  cp->add_option("--patch", pre.patch, "Patch size in pixels");
  cp->add_option("--image", pre.image,
                 "Input resolution (0 = dataset resolution)");
  cp->add_option("--tau", pre.tau, "Contrastive temperature");
  cp->add_option("--lambda-scl", pre.lambda_scl, "Contrastive loss weight");
  cp->add_option("--lambda-normal", pre.lambda_normal,
                 "Normal-map loss weight");
  cp->add_option("--seed", pre.seed, "Global seed");
  cp->add_option("--batch", pre.batch, "Contacts per batch (two views each)");
  cp->add_option("--lr", pre.lr, "Adam learning rate");
  cp->add_option("--calib", pre.calib,
                 "Calibration override: k0|k4|k8|k9|k18 (default: dataset)");
  cp->add_flag("--no-augment", pre.no_augment, "Disable view augmentation");

  EvalArgs ev;
  CLI::App* ce = app.add_subcommand(
      "eval-transfer", "Cross-sensor transfer matrix with a frozen encoder");
  ce->add_option("--task", ev.task, "classification|pose");
  ce->add_option("--data", ev.data, "Dataset directory or manifest path")
      ->required();
  ce->add_option("--ckpt", ev.ckpt, "Checkpoint directory")->required();
  ce->add_option("--out", ev.out, "Output directory")->required();
  ce->add_option("--epochs", ev.epochs, "Head training epochs");
  ce->add_option("--seed", ev.seed, "Split/head seed");
  ce->add_option("--train-frac", ev.train_frac, "Contact train fraction");
  ce->add_option("--batch", ev.batch, "Head batch size");
  ce->add_option("--lr", ev.lr, "Head learning rate");
  ce->add_option("--threads", ev.threads, "Row fan-out for matrix cells");

  RenderArgs rn;
  CLI::App* cr = app.add_subcommand("render", "Render one contact scene");
  cr->add_option("--sensor-config", rn.sensor_config, "Sensor config JSON")
      ->required();
  cr->add_option("--object", rn.object,
                 "Primitive spec, e.g. sphere:2.0 or cone:1.5,4.0")
      ->required();
  cr->add_option("--depth", rn.depth, "Press depth in mm (0 = no contact)");
  cr->add_option("--pos", rn.pos, "Press position 'x,y' in mm");
  cr->add_option("--out", rn.out, "Output file prefix")->required();

  ReconstructArgs rec;
  CLI::App* cc = app.add_subcommand(
      "reconstruct", "Integrate a normal map into a height field");
  cc->add_option("--normal", rec.normal, "Normal map TNSR ([H, W, 3] f32)")
      ->required();
  cc->add_option("--pitch-mm", rec.pitch_mm, "Pixel pitch in mm")->required();
  cc->add_option("--out", rec.out, "Height TNSR output path")->required();

  AblateArgs ab;
  CLI::App* ca = app.add_subcommand("ablate", "Sweep one ablation axis");
  ca->add_option("--axis", ab.axis, "calib|tau|loss")->required();
  ca->add_option("--data", ab.data, "Dataset directory or manifest path")
      ->required();
  ca->add_option("--out", ab.out, "Output directory")->required();
  ca->add_option("--epochs", ab.epochs, "Pretrain epochs per cell");
  ca->add_option("--head-epochs", ab.head_epochs, "Head epochs per cell");
  ca->add_option("--dim", ab.dim, "Embedding dimension");
  ca->add_option("--depth", ab.depth, "Transformer blocks");
  ca->add_option("--heads", ab.heads, "Attention heads");
  ca->add_option("--patch", ab.patch, "Patch size in pixels");
  ca->add_option("--image", ab.image,
                 "Input resolution (0 = dataset resolution)");
  ca->add_option("--tau", ab.tau, "Base contrastive temperature");
  ca->add_option("--seed", ab.seed, "Global seed");
  ca->add_option("--batch", ab.batch, "Contacts per batch");
  ca->add_option("--lr", ab.lr, "Adam learning rate");
  ca->add_option("--train-frac", ab.train_frac, "Contact train fraction");
  ca->add_option("--threads", ab.threads, "Row fan-out for matrix cells");
  ca->add_flag("--no-augment", ab.no_augment, "Disable view augmentation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cg->parsed()) return run_gen(gen);
    if (cp->parsed()) return run_pretrain(pre);
    if (ce->parsed()) return run_eval_transfer(ev);
    if (cr->parsed()) return run_render(rn);
    if (cc->parsed()) return run_reconstruct(rec);
    if (ca->parsed()) return run_ablate(ab);
  } catch (const shape_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 5;
  } catch (const contract_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 5;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
