#include "rawkit/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "rawkit/error.hpp"

namespace rawkit {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open '" + path + "'");
  return f;
}

// Decoded pixels, interleaved, channels x width x height at the stated depth.
struct RawPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<unsigned char> bytes;  // row-major, big-endian for 16-bit
};

RawPng read_png(const std::string& path, int want_depth) {
  FilePtr file = open_file(path, "rb");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng allocation failure");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng allocation failure");
  }

  RawPng out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode PNG '" + path + "'");
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  int depth = png_get_bit_depth(png, info);
  int color = png_get_color_type(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (want_depth == 8 && depth == 16) png_set_strip_16(png);
  if (want_depth == 16 && depth < 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("'" + path + "' is " + std::to_string(depth) + "-bit, expected 16-bit");
  }

  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  out.channels = png_get_channels(png, info);

  std::size_t row_bytes = png_get_rowbytes(png, info);
  out.bytes.resize(row_bytes * out.height);
  rows.resize(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + row_bytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void write_png(const std::string& path, int width, int height, int channels, int depth,
               const std::vector<unsigned char>& bytes) {
  FilePtr file = open_file(path, "wb");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng allocation failure");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng allocation failure");
  }

  std::vector<png_bytep> rows(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode PNG '" + path + "'");
  }

  png_init_io(png, file.get());
  int color = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, width, height, depth, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::size_t row_bytes = static_cast<std::size_t>(width) * channels * (depth / 8);
  for (int y = 0; y < height; ++y)
    rows[y] = const_cast<png_bytep>(bytes.data()) + row_bytes * y;
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::uint16_t load_be16(const unsigned char* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

void store_be16(unsigned char* p, std::uint16_t v) {
  p[0] = static_cast<unsigned char>(v >> 8);
  p[1] = static_cast<unsigned char>(v & 0xff);
}

}  // namespace

SRGBImage read_srgb_png(const std::string& path) {
  RawPng raw = read_png(path, 8);
  if (raw.bit_depth != 8)
    throw IoError("'" + path + "' did not decode to 8-bit");
  if (raw.channels != 1 && raw.channels != 3 && raw.channels != 4)
    throw IoError("'" + path + "' has unsupported channel count " +
                  std::to_string(raw.channels));

  SRGBImage img = SRGBImage::zeros(raw.width, raw.height);
  std::size_t n = img.plane_size();
  const unsigned char* src = raw.bytes.data();
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned char* px = src + i * raw.channels;
    if (raw.channels == 1) {
      img.data[i] = img.data[n + i] = img.data[2 * n + i] = px[0];
    } else {
      img.data[i] = px[0];
      img.data[n + i] = px[1];
      img.data[2 * n + i] = px[2];
    }
  }
  return img;
}

void write_srgb_png(const SRGBImage& img, const std::string& path) {
  img.validate();
  std::size_t n = img.plane_size();
  std::vector<unsigned char> bytes(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    bytes[i * 3 + 0] = img.data[i];
    bytes[i * 3 + 1] = img.data[n + i];
    bytes[i * 3 + 2] = img.data[2 * n + i];
  }
  write_png(path, img.width, img.height, 3, 8, bytes);
}

BayerImage read_bayer_png(const std::string& path, CfaPattern cfa, int black_level,
                          int white_level) {
  RawPng raw = read_png(path, 16);
  if (raw.channels != 1)
    throw IoError("'" + path + "' has " + std::to_string(raw.channels) +
                  " channels, expected a single-channel mosaic");

  BayerImage img;
  img.width = raw.width;
  img.height = raw.height;
  img.cfa = cfa;
  img.black_level = black_level;
  img.white_level = white_level;
  img.samples.resize(static_cast<std::size_t>(raw.width) * raw.height);
  for (std::size_t i = 0; i < img.samples.size(); ++i)
    img.samples[i] = load_be16(raw.bytes.data() + i * 2);
  img.validate();
  return img;
}

void write_bayer_png(const BayerImage& img, const std::string& path) {
  img.validate();
  std::vector<unsigned char> bytes(img.samples.size() * 2);
  for (std::size_t i = 0; i < img.samples.size(); ++i)
    store_be16(bytes.data() + i * 2, img.samples[i]);
  write_png(path, img.width, img.height, 1, 16, bytes);
}

void write_rgb16_png(const LinearImage& img, const std::string& path) {
  img.validate();
  std::size_t n = img.plane_size();
  std::vector<unsigned char> bytes(n * 3 * 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      float v = img.data[c * n + i];
      if (v < 0.0f) v = 0.0f;
      if (v > 1.0f) v = 1.0f;
      auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      store_be16(bytes.data() + (i * 3 + c) * 2, q);
    }
  }
  write_png(path, img.width, img.height, 3, 16, bytes);
}

}  // namespace rawkit
