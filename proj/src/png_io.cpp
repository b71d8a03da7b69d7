#include "sitr/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "sitr/errors.hpp"

namespace sitr {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_png8(const std::filesystem::path& path, int h, int w, int channels,
                const std::vector<std::uint8_t>& bytes) {
  if (static_cast<std::size_t>(h) * w * channels != bytes.size())
    throw contract_error("png payload size mismatch for " + path.string());
  FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) throw io_error("cannot open for write: " + path.string());

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw io_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw io_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw io_error("png write failed: " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w),
               static_cast<png_uint_32>(h), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y)
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(y) * w * channels);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png_rgb8(const std::filesystem::path& path, int h, int w,
                    const std::vector<std::uint8_t>& rgb) {
  write_png8(path, h, w, 3, rgb);
}

void write_png_gray8(const std::filesystem::path& path, int h, int w,
                     const std::vector<std::uint8_t>& gray) {
  write_png8(path, h, w, 1, gray);
}

Image read_png_rgb(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw io_error("cannot open for read: " + path.string());
  png_byte header[8];
  if (std::fread(header, 1, 8, f.get()) != 8 || png_sig_cmp(header, 0, 8))
    throw io_error("not a png file: " + path.string());

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw io_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw io_error("png_create_info_struct failed");
  }
  std::vector<std::uint8_t> bytes;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw io_error("png read failed: " + path.string());
  }
  png_init_io(png, f.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  // Normalize anything 8-bit-ish to plain RGB.
  png_set_strip_16(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  const int h = static_cast<int>(png_get_image_height(png, info));
  const int w = static_cast<int>(png_get_image_width(png, info));
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  if (rowbytes != static_cast<std::size_t>(w) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw io_error("unexpected png row size in " + path.string());
  }
  bytes.resize(static_cast<std::size_t>(h) * w * 3);
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y)
    rows[static_cast<std::size_t>(y)] = bytes.data() + static_cast<std::size_t>(y) * w * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return dequantize_u8(bytes.data(), h, w, 3);
}

void write_png_image(const std::filesystem::path& path, const Image& img) {
  if (img.c == 3) {
    write_png_rgb8(path, img.h, img.w, quantize_u8(img));
  } else if (img.c == 1) {
    write_png_gray8(path, img.h, img.w, quantize_u8(img));
  } else {
    throw contract_error("png image must have 1 or 3 channels");
  }
}

}  // namespace sitr
