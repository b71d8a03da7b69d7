#include "sitr/model/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <system_error>

#include "sitr/sha256.hpp"
#include "sitr/tnsr.hpp"

namespace sitr::model {

namespace fs = std::filesystem;

void save_checkpoint(const fs::path& dir, const EncoderState<float>& st) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create checkpoint dir " + dir.string());
  {
    std::ofstream out(dir / "config.json", std::ios::binary);
    if (!out) throw io_error("cannot write " + (dir / "config.json").string());
    out << st.cfg.to_json();
  }
  for (const auto& [name, t] : st.params) {
    std::vector<std::uint32_t> dims;
    for (auto d : t.dims()) dims.push_back(static_cast<std::uint32_t>(d));
    write_tnsr_f32(dir / (name + ".tnsr"), dims, t.data());
  }
}

EncoderState<float> load_checkpoint(const fs::path& dir) {
  std::ifstream in(dir / "config.json", std::ios::binary);
  if (!in) throw io_error("cannot read " + (dir / "config.json").string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  EncoderConfig cfg = EncoderConfig::from_json(text);
  EncoderState<float> st = init_encoder<float>(cfg, /*seed=*/0);
  for (auto& [name, t] : st.params) {
    TnsrData d = read_tnsr(dir / (name + ".tnsr"));
    if (d.dtype != TnsrDtype::kF32)
      throw contract_error("parameter " + name + " is not f32");
    const auto& want = t.dims();
    if (d.dims.size() != want.size())
      throw shape_error("parameter " + name + " has wrong rank");
    for (std::size_t i = 0; i < want.size(); ++i)
      if (static_cast<std::int64_t>(d.dims[i]) != want[i])
        throw shape_error("parameter " + name + " has wrong shape");
    auto dst = t.data();
    std::memcpy(dst.data(), d.payload.data(), d.payload.size());
  }
  return st;
}

std::string state_checksum(const EncoderState<float>& st) {
  std::vector<std::uint8_t> bytes;
  for (const auto& [name, t] : st.params) {
    bytes.insert(bytes.end(), name.begin(), name.end());
    bytes.push_back('\n');
    auto span = t.data();
    const auto* raw = reinterpret_cast<const std::uint8_t*>(span.data());
    bytes.insert(bytes.end(), raw, raw + span.size() * sizeof(float));
  }
  return sha256_hex(std::span<const std::uint8_t>(bytes));
}

}  // namespace sitr::model
