#include "dbcc/io/image.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "dbcc/common.hpp"

namespace dbcc {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Tensor<float> from_interleaved(const std::vector<std::uint8_t>& rgb, int h,
                               int w) {
  Tensor<float> out(Shape{3, h, w});
  const std::size_t plane = std::size_t(h) * w;
  for (std::size_t i = 0; i < plane; ++i)
    for (int c = 0; c < 3; ++c)
      out.data()[std::size_t(c) * plane + i] =
          float(rgb[i * 3 + std::size_t(c)]) / 255.0f;
  return out;
}

std::vector<std::uint8_t> to_interleaved(const Tensor<float>& img) {
  const std::size_t plane = std::size_t(img.dim(1)) * img.dim(2);
  std::vector<std::uint8_t> rgb(plane * 3);
  for (std::size_t i = 0; i < plane; ++i)
    for (int c = 0; c < 3; ++c) {
      float v = img.data()[std::size_t(c) * plane + i];
      v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
      rgb[i * 3 + std::size_t(c)] =
          std::uint8_t(std::lround(double(v) * 255.0));
    }
  return rgb;
}

Tensor<float> load_png(std::FILE* f, const std::string& path) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw data_error("png: allocation failure reading " + path);
  }
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw format_error("png: corrupt or unreadable file: " + path);
  }
  png_init_io(png, f);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  if (color & PNG_COLOR_MASK_ALPHA ||
      png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw data_error("png: alpha channel not supported, flatten first: " +
                     path);
  }
  // Normalize palette/gray/16-bit inputs to 8-bit RGB.
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY) png_set_gray_to_rgb(png);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  png_set_expand(png);
  png_read_update_info(png, info);

  const int w = int(png_get_image_width(png, info));
  const int h = int(png_get_image_height(png, info));
  if (png_get_channels(png, info) != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw data_error("png: expected 8-bit RGB: " + path);
  }
  pixels.resize(std::size_t(h) * w * 3);
  rows.resize(std::size_t(h));
  for (int i = 0; i < h; ++i)
    rows[std::size_t(i)] = pixels.data() + std::size_t(i) * w * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return from_interleaved(pixels, h, w);
}

void save_png(const std::string& path, const Tensor<float>& img) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw data_error("cannot open for writing: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw data_error("png: allocation failure writing " + path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw data_error("png: write failed: " + path);
  }
  const int h = img.dim(1), w = img.dim(2);
  png_init_io(png, f.get());
  png_set_IHDR(png, info, png_uint_32(w), png_uint_32(h), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  auto rgb = to_interleaved(img);
  for (int i = 0; i < h; ++i)
    png_write_row(png, rgb.data() + std::size_t(i) * w * 3);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

int read_pnm_int(std::FILE* f, const std::string& path) {
  int c;
  // skip whitespace and '#' comments
  while ((c = std::fgetc(f)) != EOF) {
    if (c == '#') {
      while ((c = std::fgetc(f)) != EOF && c != '\n') {
      }
    } else if (!std::isspace(c)) {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c))
    throw format_error("ppm: malformed header: " + path);
  int v = 0;
  do {
    v = v * 10 + (c - '0');
    c = std::fgetc(f);
  } while (c != EOF && std::isdigit(c));
  return v;
}

Tensor<float> load_ppm(std::FILE* f, const std::string& path) {
  if (std::fgetc(f) != 'P' || std::fgetc(f) != '6')
    throw format_error("ppm: only binary P6 supported: " + path);
  const int w = read_pnm_int(f, path);
  const int h = read_pnm_int(f, path);
  const int maxval = read_pnm_int(f, path);
  if (w <= 0 || h <= 0) throw format_error("ppm: bad dimensions: " + path);
  if (maxval != 255)
    throw data_error("ppm: only 8-bit (maxval 255) supported: " + path);
  std::vector<std::uint8_t> pixels(std::size_t(h) * w * 3);
  if (std::fread(pixels.data(), 1, pixels.size(), f) != pixels.size())
    throw format_error("ppm: truncated pixel data: " + path);
  return from_interleaved(pixels, h, w);
}

void save_ppm(const std::string& path, const Tensor<float>& img) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw data_error("cannot open for writing: " + path);
  std::fprintf(f.get(), "P6\n%d %d\n255\n", img.dim(2), img.dim(1));
  auto rgb = to_interleaved(img);
  if (std::fwrite(rgb.data(), 1, rgb.size(), f.get()) != rgb.size())
    throw data_error("ppm: write failed: " + path);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Tensor<float> load_image(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw data_error("cannot open image: " + path);
  std::uint8_t magic[2] = {0, 0};
  if (std::fread(magic, 1, 2, f.get()) != 2)
    throw format_error("image file too short: " + path);
  std::rewind(f.get());
  if (magic[0] == 0x89 && magic[1] == 'P') return load_png(f.get(), path);
  if (magic[0] == 'P' && magic[1] == '6') return load_ppm(f.get(), path);
  throw format_error("unsupported image format (need PNG or PPM): " + path);
}

void save_image(const std::string& path, const Tensor<float>& image) {
  if (image.ndim() != 3 || image.dim(0) != 3)
    throw shape_error("save_image: expects a 3xHxW tensor");
  if (ends_with(path, ".png")) return save_png(path, image);
  if (ends_with(path, ".ppm")) return save_ppm(path, image);
  throw config_error("save_image: unsupported extension (need .png or .ppm): " +
                     path);
}

}  // namespace dbcc
