#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sitr/image.hpp"

namespace sitr {

// 8-bit PNG I/O. Color images are RGB; previews may be single-channel gray.

void write_png_rgb8(const std::filesystem::path& path, int h, int w,
                    const std::vector<std::uint8_t>& rgb);
void write_png_gray8(const std::filesystem::path& path, int h, int w,
                     const std::vector<std::uint8_t>& gray);

// Reads any 8-bit PNG as RGB.
Image read_png_rgb(const std::filesystem::path& path);

// Quantizes a [0,1] float image and writes it (c must be 1 or 3).
void write_png_image(const std::filesystem::path& path, const Image& img);

}  // namespace sitr
