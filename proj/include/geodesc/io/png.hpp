#pragma once

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <png.h>

#include "geodesc/error.hpp"
#include "geodesc/image.hpp"

namespace geodesc::io {

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct RawPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> samples;  // row-major, interleaved channels
};

[[noreturn]] inline void png_error_fn(png_structp png, png_const_charp msg) {
  *static_cast<std::string*>(png_get_error_ptr(png)) = msg;
  png_longjmp(png, 1);
}

inline void png_warning_fn(png_structp, png_const_charp) {}

// Expands palette and sub-byte gray, strips alpha and keeps 8 or 16 bits.
inline RawPng read_png_raw(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw InputError("cannot read " + path);
  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  if (!png) throw Error("libpng: cannot allocate read struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("libpng: cannot allocate info struct");
  }
  RawPng raw;
  std::vector<png_bytep> rows;
  std::vector<png_byte> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError(path + ": " + (error.empty() ? std::string("invalid PNG") : error));
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png), png_set_strip_alpha(png);
  if (png_get_bit_depth(png, info) == 16) png_set_swap(png);  // little-endian host
  png_read_update_info(png, info);

  raw.width = static_cast<int>(png_get_image_width(png, info));
  raw.height = static_cast<int>(png_get_image_height(png, info));
  raw.channels = png_get_channels(png, info);
  raw.bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * static_cast<std::size_t>(raw.height));
  rows.resize(static_cast<std::size_t>(raw.height));
  for (int y = 0; y < raw.height; ++y) rows[y] = buffer.data() + stride * static_cast<std::size_t>(y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t count = static_cast<std::size_t>(raw.width) * raw.height * raw.channels;
  raw.samples.resize(count);
  for (int y = 0; y < raw.height; ++y) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(raw.width) * raw.channels; ++i) {
      const std::size_t o = static_cast<std::size_t>(y) * raw.width * raw.channels + i;
      if (raw.bit_depth == 16) {
        std::uint16_t v;
        std::memcpy(&v, rows[y] + 2 * i, 2);
        raw.samples[o] = v;
      } else {
        raw.samples[o] = rows[y][i];
      }
    }
  }
  return raw;
}

inline void write_png_raw(const std::string& path, int width, int height, int bit_depth,
                          const std::vector<std::uint16_t>& samples) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw InputError("cannot write " + path);
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  if (!png) throw Error("libpng: cannot allocate write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("libpng: cannot allocate info struct");
  }
  const std::size_t bytes = bit_depth == 16 ? 2 : 1;
  std::vector<png_byte> buffer(static_cast<std::size_t>(width) * height * bytes);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (bytes == 2) {
      buffer[2 * i] = static_cast<png_byte>(samples[i] >> 8);  // PNG is big-endian
      buffer[2 * i + 1] = static_cast<png_byte>(samples[i] & 0xFF);
    } else {
      buffer[i] = static_cast<png_byte>(samples[i]);
    }
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[y] = buffer.data() + static_cast<std::size_t>(y) * width * bytes;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(path + ": " + (error.empty() ? std::string("PNG write failed") : error));
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  // No timestamps or text chunks: output is a pure function of the pixels.
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace detail

/// Grayscale or RGB PNG, 8 or 16 bit, as intensities in [0, 1]. Color is
/// converted with Rec. 601 luma weights.
inline IntensityImage read_intensity_png(const std::string& path) {
  const detail::RawPng raw = detail::read_png_raw(path);
  const double scale = raw.bit_depth == 16 ? 65535.0 : 255.0;
  IntensityImage img(raw.width, raw.height);
  for (int y = 0; y < raw.height; ++y) {
    for (int x = 0; x < raw.width; ++x) {
      const std::size_t o = (static_cast<std::size_t>(y) * raw.width + x) * raw.channels;
      if (raw.channels >= 3) {
        img(x, y) = rgb_to_intensity(raw.samples[o] / scale, raw.samples[o + 1] / scale, raw.samples[o + 2] / scale);
      } else {
        img(x, y) = raw.samples[o] / scale;
      }
    }
  }
  return img;
}

/// 8-bit grayscale; values are clamped to [0, 1] and rounded.
inline void write_intensity_png(const std::string& path, const IntensityImage& image) {
  std::vector<std::uint16_t> samples(image.pixels().size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = static_cast<std::uint16_t>(std::lround(std::clamp(image.pixels()[i], 0.0, 1.0) * 255.0));
  }
  detail::write_png_raw(path, image.width(), image.height(), 8, samples);
}

/// 16-bit single-channel depth in millimetres; 0 is INVALID.
inline DepthImage read_depth_png(const std::string& path) {
  const detail::RawPng raw = detail::read_png_raw(path);
  if (raw.channels != 1 || raw.bit_depth != 16) throw InputError(path + ": depth must be 16-bit grayscale");
  DepthImage depth(raw.width, raw.height);
  for (std::size_t i = 0; i < raw.samples.size(); ++i) depth.pixels()[i] = raw.samples[i];
  return depth;
}

inline void write_depth_png(const std::string& path, const DepthImage& depth) {
  std::vector<std::uint16_t> samples(depth.pixels().size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = depth.pixels()[i];
    if (!is_valid_depth(d)) continue;
    const long mm = std::lround(d);
    if (mm < 1 || mm > 65535) throw InputError(path + ": depth " + std::to_string(d) + " mm outside 16-bit range");
    samples[i] = static_cast<std::uint16_t>(mm);
  }
  detail::write_png_raw(path, depth.width(), depth.height(), 16, samples);
}

/// Binary (P5) PGM, 8 or 16 bit, as intensities in [0, 1].
inline IntensityImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  auto token = [&]() {
    std::string t;
    while (in >> std::ws && in.peek() == '#') std::getline(in, t);
    in >> t;
    return t;
  };
  if (token() != "P5") throw InputError(path + ": not a binary PGM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw InputError(path + ": malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw InputError(path + ": malformed PGM header");
  in.get();
  IntensityImage img(w, h);
  const bool wide = maxval > 255;
  for (auto& v : img.pixels()) {
    int value = in.get();
    if (wide) value = (value << 8) | in.get();
    if (!in) throw InputError(path + ": truncated PGM");
    v = static_cast<double>(value) / maxval;
  }
  return img;
}

/// Reads PNG or PGM by extension.
inline IntensityImage read_intensity(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".pgm" || ext == ".PGM") return read_pgm(path);
  return read_intensity_png(path);
}

}  // namespace geodesc::io
