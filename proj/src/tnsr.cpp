#include "sitr/tnsr.hpp"

#include <cstdio>
#include <cstring>

#include "sitr/errors.hpp"

namespace sitr {

namespace {

constexpr char kMagic[4] = {'T', 'N', 'S', 'R'};
constexpr std::uint8_t kVersion = 1;

std::size_t dtype_size(TnsrDtype d) {
  switch (d) {
    case TnsrDtype::kF32:
      return 4;
    case TnsrDtype::kU8:
      return 1;
  }
  throw io_error("unknown tnsr dtype");
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

std::vector<float> TnsrData::as_f32() const {
  if (dtype != TnsrDtype::kF32)
    throw io_error("tnsr payload is not f32");
  std::vector<float> out(payload.size() / 4);
  std::memcpy(out.data(), payload.data(), payload.size());
  return out;
}

void write_tnsr(const std::filesystem::path& path, const TnsrData& data) {
  if (data.dims.size() > 255)
    throw contract_error("tnsr rank exceeds 255");
  const std::uint64_t expect = data.count() * dtype_size(data.dtype);
  if (expect != data.payload.size())
    throw contract_error("tnsr payload size does not match dims");
  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) throw io_error("cannot open for write: " + path.string());
  auto put = [&](const void* p, std::size_t n) {
    if (std::fwrite(p, 1, n, f.get()) != n)
      throw io_error("short write: " + path.string());
  };
  put(kMagic, 4);
  put(&kVersion, 1);
  const std::uint8_t dt = static_cast<std::uint8_t>(data.dtype);
  put(&dt, 1);
  const std::uint8_t nd = static_cast<std::uint8_t>(data.dims.size());
  put(&nd, 1);
  for (std::uint32_t d : data.dims) {
    std::uint8_t le[4] = {static_cast<std::uint8_t>(d & 0xff),
                          static_cast<std::uint8_t>((d >> 8) & 0xff),
                          static_cast<std::uint8_t>((d >> 16) & 0xff),
                          static_cast<std::uint8_t>((d >> 24) & 0xff)};
    put(le, 4);
  }
  if (!data.payload.empty()) put(data.payload.data(), data.payload.size());
}

TnsrData read_tnsr(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw io_error("cannot open for read: " + path.string());
  auto get = [&](void* p, std::size_t n) {
    if (std::fread(p, 1, n, f.get()) != n)
      throw io_error("truncated tnsr file: " + path.string());
  };
  char magic[4];
  get(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw io_error("bad tnsr magic in " + path.string());
  std::uint8_t version = 0, dt = 0, nd = 0;
  get(&version, 1);
  if (version != kVersion)
    throw io_error("unsupported tnsr version in " + path.string());
  get(&dt, 1);
  if (dt > 1) throw io_error("unsupported tnsr dtype in " + path.string());
  get(&nd, 1);
  TnsrData data;
  data.dtype = static_cast<TnsrDtype>(dt);
  data.dims.resize(nd);
  for (std::uint8_t i = 0; i < nd; ++i) {
    std::uint8_t le[4];
    get(le, 4);
    data.dims[i] = static_cast<std::uint32_t>(le[0]) |
                   (static_cast<std::uint32_t>(le[1]) << 8) |
                   (static_cast<std::uint32_t>(le[2]) << 16) |
                   (static_cast<std::uint32_t>(le[3]) << 24);
  }
  const std::uint64_t bytes = data.count() * dtype_size(data.dtype);
  data.payload.resize(bytes);
  if (bytes) get(data.payload.data(), bytes);
  // Trailing junk means the writer and header disagree.
  std::uint8_t probe;
  if (std::fread(&probe, 1, 1, f.get()) == 1)
    throw io_error("trailing bytes after tnsr payload in " + path.string());
  return data;
}

void write_tnsr_f32(const std::filesystem::path& path,
                    const std::vector<std::uint32_t>& dims,
                    std::span<const float> values) {
  TnsrData d;
  d.dtype = TnsrDtype::kF32;
  d.dims = dims;
  d.payload.resize(values.size() * 4);
  std::memcpy(d.payload.data(), values.data(), d.payload.size());
  write_tnsr(path, d);
}

void write_tnsr_u8(const std::filesystem::path& path,
                   const std::vector<std::uint32_t>& dims,
                   std::span<const std::uint8_t> values) {
  TnsrData d;
  d.dtype = TnsrDtype::kU8;
  d.dims = dims;
  d.payload.assign(values.begin(), values.end());
  write_tnsr(path, d);
}

}  // namespace sitr
