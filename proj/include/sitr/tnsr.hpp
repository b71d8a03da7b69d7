#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sitr {

// Binary tensor container: magic "TNSR", version u8 = 1, dtype u8
// (0 = f32, 1 = u8), ndim u8, then ndim little-endian u32 extents, then the
// row-major payload. Write/read is a bitwise roundtrip.

enum class TnsrDtype : std::uint8_t { kF32 = 0, kU8 = 1 };

struct TnsrData {
  TnsrDtype dtype = TnsrDtype::kF32;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> payload;

  std::uint64_t count() const {
    std::uint64_t n = 1;
    for (std::uint32_t d : dims) n *= d;
    return n;
  }
  std::vector<float> as_f32() const;
};

void write_tnsr(const std::filesystem::path& path, const TnsrData& data);
TnsrData read_tnsr(const std::filesystem::path& path);

void write_tnsr_f32(const std::filesystem::path& path,
                    const std::vector<std::uint32_t>& dims,
                    std::span<const float> values);
void write_tnsr_u8(const std::filesystem::path& path,
                   const std::vector<std::uint32_t>& dims,
                   std::span<const std::uint8_t> values);

}  // namespace sitr
