#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sitr/image.hpp"
#include "sitr/png_io.hpp"
#include "sitr/sha256.hpp"
#include "sitr/sim/sensor.hpp"
#include "sitr/tnsr.hpp"

#ifndef SITR_BIN
#error "SITR_BIN must point at the command-line binary"
#endif

using namespace sitr;
namespace fs = std::filesystem;

namespace {

// Runs the tool and returns its exit code; stdout/stderr go to /dev/null so
// test output stays readable.
int run(const std::string& args) {
  const std::string cmd =
      std::string(SITR_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

// One tiny dataset shared by the pipeline cases below.
struct Fixture {
  fs::path dir;
  fs::path data;
  Fixture() : dir(scratch_dir("sitr_cli")), data(dir / "data") {
    REQUIRE(run("gen --sensors 2 --contacts 8 --seed 11 --calib k4 --out " +
                q(data) + " --resolution 16") == 0);
  }
};

}  // namespace

TEST_CASE("gen: artifacts, summary determinism, usage errors") {
  fs::path dir = scratch_dir("sitr_cli_gen");
  const fs::path d1 = dir / "d1", d2 = dir / "d2";
  REQUIRE(run("gen --sensors 2 --contacts 3 --seed 7 --calib k4 --out " +
              q(d1) + " --resolution 16") == 0);
  CHECK(fs::exists(d1 / "run_config.json"));
  CHECK(fs::exists(d1 / "manifest.json"));

  // Same flags: byte-identical manifest.
  REQUIRE(run("gen --sensors 2 --contacts 3 --seed 7 --calib k4 --out " +
              q(d2) + " --resolution 16") == 0);
  CHECK(sha256_file(d1 / "manifest.json") == sha256_file(d2 / "manifest.json"));

  // Alignment needs at least two sensors for paired views.
  CHECK(run("gen --sensors 1 --contacts 3 --seed 7 --out " + q(dir / "bad") +
            " --resolution 16") == 2);
  // Missing required flag and unknown flag are usage errors.
  CHECK(run("gen --sensors 2 --out " + q(dir / "bad2")) == 2);
  CHECK(run("gen --sensors 2 --contacts 2 --out " + q(dir / "bad3") +
            " --bogus 1") == 2);
  CHECK(run("totally-unknown-command") == 2);
  CHECK(run("--help") == 0);
  fs::remove_all(dir);
}

TEST_CASE("pretrain then eval-transfer: artifacts and reported numbers agree") {
  Fixture fx;
  const fs::path runa = fx.dir / "runa", runb = fx.dir / "runb";
  const std::string flags =
      " --epochs 3 --dim 128 --depth 4 --heads 4 --patch 8 --image 16"
      " --batch 4 --seed 3 --out ";
  REQUIRE(run("pretrain --data " + q(fx.data) + flags + q(runa)) == 0);
  CHECK(fs::exists(runa / "run_config.json"));
  CHECK(fs::exists(runa / "ckpt" / "config.json"));

  // Loss CSV: header plus one row per step, final total below the first.
  auto rows = read_csv(runa / "loss.csv");
  REQUIRE(rows.size() >= 3);
  CHECK(rows[0] == std::vector<std::string>{"step", "l_normal", "l_scl",
                                            "total"});
  const double first = std::stod(rows[1].back());
  const double last = std::stod(rows.back().back());
  CHECK(last < first);

  // Identical flags reproduce the checkpoint bitwise.
  REQUIRE(run("pretrain --data " + q(fx.data) + flags + q(runb)) == 0);
  CHECK(sha256_dir(runa / "ckpt") == sha256_dir(runb / "ckpt"));

  const fs::path ev = fx.dir / "ev";
  REQUIRE(run("eval-transfer --task classification --data " + q(fx.data) +
              " --ckpt " + q(runa / "ckpt") + " --epochs 2 --seed 5 --out " +
              q(ev)) == 0);
  CHECK(fs::exists(ev / "run_config.json"));
  CHECK(fs::exists(ev / "embeddings.csv"));

  // The 2x2 matrix has every cell, and the summary equals the CSV's means.
  auto m = read_csv(ev / "transfer_matrix.csv");
  REQUIRE(m.size() == 3);
  REQUIRE(m[1].size() == 3);
  const double a00 = std::stod(m[1][1]), a01 = std::stod(m[1][2]);
  const double a10 = std::stod(m[2][1]), a11 = std::stod(m[2][2]);
  std::ifstream js(ev / "summary.json");
  std::stringstream buf;
  buf << js.rdbuf();
  const std::string summary = buf.str();
  CHECK(summary.find("\"metric_kind\": \"accuracy\"") != std::string::npos);
  auto field = [&](const std::string& key) {
    const auto pos = summary.find("\"" + key + "\":");
    REQUIRE(pos != std::string::npos);
    return std::stod(summary.substr(pos + key.size() + 3));
  };
  CHECK(field("transfer") == doctest::Approx((a01 + a10) / 2).epsilon(1e-9));
  CHECK(field("no_transfer") ==
        doctest::Approx((a00 + a11) / 2).epsilon(1e-9));

  // Pose pairs need same-class contacts in both splits; a single-class
  // dataset guarantees that for any split.
  const fs::path posed = fx.dir / "posed";
  REQUIRE(run("gen --sensors 2 --contacts 8 --seed 11 --calib k4 --out " +
              q(posed) + " --resolution 16 --classes sphere") == 0);
  const fs::path evp = fx.dir / "evp";
  REQUIRE(run("eval-transfer --task pose --data " + q(posed) + " --ckpt " +
              q(runa / "ckpt") + " --epochs 1 --seed 5 --out " + q(evp)) == 0);
  auto mp = read_csv(evp / "transfer_matrix.csv");
  REQUIRE(mp.size() == 3);
  std::ifstream jp(evp / "summary.json");
  std::stringstream bp;
  bp << jp.rdbuf();
  CHECK(bp.str().find("\"metric_kind\": \"rmse\"") != std::string::npos);

  // A dataset whose classes are all singletons cannot form pose pairs:
  // contract failure, and no summary is left behind without its matrix.
  const fs::path tiny = fx.dir / "tiny";
  REQUIRE(run("gen --sensors 2 --contacts 3 --seed 2 --calib k4 --out " +
              q(tiny) + " --resolution 16") == 0);
  const fs::path evbad = fx.dir / "evbad";
  CHECK(run("eval-transfer --task pose --data " + q(tiny) + " --ckpt " +
            q(runa / "ckpt") + " --epochs 1 --seed 5 --out " + q(evbad)) == 5);
  CHECK(fs::exists(evbad / "run_config.json"));
  CHECK(!fs::exists(evbad / "summary.json"));
  CHECK(!fs::exists(evbad / "transfer_matrix.csv"));
  fs::remove_all(fx.dir);
}

TEST_CASE("render: outputs, zero-depth signal, light-angle sensitivity") {
  fs::path dir = scratch_dir("sitr_cli_render");
  sim::SensorConfig cfg = sim::sample_sensor_config(5, 0, 32);
  std::ofstream(dir / "sensor.json") << cfg.to_json();

  const std::string base = "render --sensor-config " + q(dir / "sensor.json");
  REQUIRE(run(base + " --object sphere:2.0 --depth 0.5 --pos 0,0 --out " +
              q(dir / "cap")) == 0);
  CHECK(fs::exists(dir / "cap_image.png"));
  CHECK(fs::exists(dir / "run_config.json"));
  TnsrData t = read_tnsr(dir / "cap_normal.tnsr");
  CHECK(t.dims == std::vector<std::uint32_t>{32, 32, 3});

  // No press: the background-subtracted signal is exactly zero everywhere,
  // which the (s+1)/2 byte mapping sends to mid-gray 128.
  REQUIRE(run(base + " --object sphere:2.0 --depth 0 --pos 0,0 --out " +
              q(dir / "flat")) == 0);
  Image sig = read_png_rgb(dir / "flat_signal.png");
  for (float v : sig.px) CHECK(v == doctest::Approx(128.0f / 255.0f));

  // The same scene under the two illumination-angle extremes must differ.
  sim::SensorConfig lo = cfg, hi = cfg;
  lo.light_angle_deg = 5.0;
  hi.light_angle_deg = 30.0;
  std::ofstream(dir / "lo.json") << lo.to_json();
  std::ofstream(dir / "hi.json") << hi.to_json();
  REQUIRE(run("render --sensor-config " + q(dir / "lo.json") +
              " --object sphere:2.0 --depth 0.5 --pos 0,0 --out " +
              q(dir / "lo")) == 0);
  REQUIRE(run("render --sensor-config " + q(dir / "hi.json") +
              " --object sphere:2.0 --depth 0.5 --pos 0,0 --out " +
              q(dir / "hi")) == 0);
  Image a = read_png_rgb(dir / "lo_image.png");
  Image b = read_png_rgb(dir / "hi_image.png");
  double l1 = 0;
  for (std::size_t i = 0; i < a.px.size(); ++i)
    l1 += std::abs(a.px[i] - b.px[i]);
  CHECK(l1 > 0.0);

  CHECK(run(base + " --object pyramid:2 --depth 0.5 --pos 0,0 --out " +
            q(dir / "bad")) == 2);
  CHECK(run(base + " --object sphere:2.0 --depth 0.5 --pos zero --out " +
            q(dir / "bad")) == 2);
  CHECK(run(base + " --object sphere:2.0 --depth 9 --pos 0,0 --out " +
            q(dir / "bad")) == 2);
  fs::remove_all(dir);
}

TEST_CASE("reconstruct: flat field, dims, malformed input") {
  fs::path dir = scratch_dir("sitr_cli_rec");
  // Constant straight-up normals: the integrated surface is flat zero.
  std::vector<float> up(12 * 10 * 3, 0.f);
  for (std::size_t i = 2; i < up.size(); i += 3) up[i] = 1.f;
  write_tnsr_f32(dir / "up.tnsr", {12, 10, 3}, up);
  REQUIRE(run("reconstruct --normal " + q(dir / "up.tnsr") +
              " --pitch-mm 0.1 --out " + q(dir / "h.tnsr")) == 0);
  TnsrData h = read_tnsr(dir / "h.tnsr");
  CHECK(h.dims == std::vector<std::uint32_t>{12, 10});
  for (float v : h.as_f32()) CHECK(std::abs(v) < 1e-9f);
  CHECK(fs::exists(dir / "h.png"));

  std::ofstream(dir / "garbage.tnsr") << "not a tensor";
  CHECK(run("reconstruct --normal " + q(dir / "garbage.tnsr") +
            " --pitch-mm 0.1 --out " + q(dir / "x.tnsr")) == 3);
  // Wrong shape (rank 2) is malformed input, not a contract failure.
  write_tnsr_f32(dir / "flat2d.tnsr", {4, 4}, std::vector<float>(16, 1.f));
  CHECK(run("reconstruct --normal " + q(dir / "flat2d.tnsr") +
            " --pitch-mm 0.1 --out " + q(dir / "x.tnsr")) == 3);
  CHECK(run("reconstruct --normal " + q(dir / "up.tnsr") +
            " --pitch-mm 0 --out " + q(dir / "x.tnsr")) == 2);
  fs::remove_all(dir);
}

TEST_CASE("ablate: loss axis emits one named row per cell") {
  Fixture fx;
  const fs::path out = fx.dir / "ab";
  REQUIRE(run("ablate --axis loss --data " + q(fx.data) + " --out " + q(out) +
              " --epochs 1 --head-epochs 1 --dim 32 --depth 1 --heads 2"
              " --patch 8 --image 16 --batch 4 --seed 3") == 0);
  auto rows = read_csv(out / "ablation.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"cell", "transfer",
                                            "no_transfer"});
  CHECK(rows[1][0] == "normal_only");
  CHECK(rows[2][0] == "scl_only");
  CHECK(rows[3][0] == "both");
  CHECK(run("ablate --axis widths --data " + q(fx.data) + " --out " +
            q(fx.dir / "ab2")) == 2);
  fs::remove_all(fx.dir);
}
