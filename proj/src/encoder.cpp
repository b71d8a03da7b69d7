#include "sitr/model/encoder.hpp"

#include <cmath>

#include "json.hpp"

namespace sitr::model {

void EncoderConfig::validate() const {
  if (image_size <= 0 || patch_size <= 0)
    throw config_error("image_size and patch_size must be positive");
  if (image_size % patch_size != 0)
    throw config_error("image_size must be a multiple of patch_size");
  if (embed_dim <= 0 || depth <= 0 || num_heads <= 0)
    throw config_error("embed_dim, depth, and num_heads must be positive");
  if (embed_dim % num_heads != 0)
    throw config_error("embed_dim must be divisible by num_heads");
  if (embed_dim % 4 != 0)
    throw config_error("embed_dim must be divisible by 4 for the pos table");
  if (calib_count < 0) throw config_error("calib_count must be >= 0");
}

std::string EncoderConfig::to_json() const {
  nlohmann::ordered_json j;
  j["image_size"] = image_size;
  j["patch_size"] = patch_size;
  j["embed_dim"] = embed_dim;
  j["depth"] = depth;
  j["num_heads"] = num_heads;
  j["calib_count"] = calib_count;
  return j.dump(2) + "\n";
}

EncoderConfig EncoderConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad encoder config: ") + e.what());
  }
  EncoderConfig c;
  try {
    c.image_size = j.at("image_size").get<int>();
    c.patch_size = j.at("patch_size").get<int>();
    c.embed_dim = j.at("embed_dim").get<int>();
    c.depth = j.at("depth").get<int>();
    c.num_heads = j.at("num_heads").get<int>();
    c.calib_count = j.at("calib_count").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad encoder config: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<double> build_pos_table(const EncoderConfig& cfg) {
  const int g = cfg.grid();
  const int d = cfg.embed_dim;
  const int quarter = d / 4;
  std::vector<double> table(static_cast<std::size_t>(g) * g * d, 0.0);
  for (int gy = 0; gy < g; ++gy) {
    for (int gx = 0; gx < g; ++gx) {
      double* row = table.data() + (static_cast<std::size_t>(gy) * g + gx) * d;
      for (int i = 0; i < quarter; ++i) {
        const double omega =
            std::pow(10000.0, -static_cast<double>(i) / quarter);
        row[i] = std::sin(gx * omega);
        row[quarter + i] = std::cos(gx * omega);
        row[2 * quarter + i] = std::sin(gy * omega);
        row[3 * quarter + i] = std::cos(gy * omega);
      }
    }
  }
  return table;
}

Image stack_calibration(const std::vector<Image>& slices) {
  if (slices.empty()) return Image{};
  const int h = slices[0].h, w = slices[0].w;
  const int k = static_cast<int>(slices.size());
  for (const auto& s : slices) {
    if (s.h != h || s.w != w || s.c != 3)
      throw shape_error("calibration slices must share an H x W x 3 shape");
  }
  Image out(h, w, 3 * k);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int s = 0; s < k; ++s)
        for (int ch = 0; ch < 3; ++ch)
          out.at(y, x, 3 * s + ch) = slices[s].at(y, x, ch);
  return out;
}

}  // namespace sitr::model
