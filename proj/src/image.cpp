#include "hyperstar/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace hyperstar {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

}  // namespace

ImageU8 read_png(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw value_error("cannot open " + path);
  png_byte header[8];
  if (std::fread(header, 1, 8, f.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
    throw value_error(path + " is not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw value_error("png reader allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw value_error("png reader allocation failed");
  }
  std::vector<png_bytep> row_ptrs;
  ImageU8 img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw value_error("failed to decode " + path);
  }
  png_init_io(png, f.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);

  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  if (png_get_rowbytes(png, info) != static_cast<size_t>(img.width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw value_error("unexpected row layout in " + path);
  }
  img.rgb.resize(static_cast<size_t>(img.width) * img.height * 3);
  row_ptrs.resize(static_cast<size_t>(img.height));
  for (int y = 0; y < img.height; ++y)
    row_ptrs[static_cast<size_t>(y)] = img.rgb.data() + static_cast<size_t>(y) * img.width * 3;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::string& path, const ImageU8& img) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw value_error("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw value_error("png writer allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw value_error("png writer allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw value_error("failed to encode " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, const_cast<png_bytep>(img.rgb.data() +
                                             static_cast<size_t>(y) * img.width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

ImageU8 resize_bilinear(const ImageU8& img, int out_w, int out_h) {
  if (img.width == out_w && img.height == out_h) return img;
  ImageU8 out;
  out.width = out_w;
  out.height = out_h;
  out.rgb.resize(static_cast<size_t>(out_w) * out_h * 3);
  const double sx = static_cast<double>(img.width) / out_w;
  const double sy = static_cast<double>(img.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    const double fy = (y + 0.5) * sy - 0.5;
    const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, img.height - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = std::clamp(fy - y0, 0.0, 1.0);
    for (int x = 0; x < out_w; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, img.width - 1);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = std::clamp(fx - x0, 0.0, 1.0);
      for (int c = 0; c < 3; ++c) {
        auto px = [&](int yy, int xx) {
          return static_cast<double>(
              img.rgb[(static_cast<size_t>(yy) * img.width + xx) * 3 + c]);
        };
        const double top = px(y0, x0) * (1 - wx) + px(y0, x1) * wx;
        const double bot = px(y1, x0) * (1 - wx) + px(y1, x1) * wx;
        out.rgb[(static_cast<size_t>(y) * out_w + x) * 3 + c] =
            static_cast<uint8_t>(std::lround(std::clamp(top * (1 - wy) + bot * wy, 0.0, 255.0)));
      }
    }
  }
  return out;
}

Tensor image_to_tensor(const ImageU8& img) {
  Tensor t = Tensor::zeros({3, img.height, img.width});
  const int64_t hw = static_cast<int64_t>(img.height) * img.width;
  for (int64_t i = 0; i < hw; ++i)
    for (int c = 0; c < 3; ++c)
      t.data()[c * hw + i] = static_cast<double>(img.rgb[i * 3 + c]) / 127.5 - 1.0;
  return t;
}

ImageU8 tensor_to_image(const Tensor& t) {
  if (t.ndim() != 3 || t.size(0) != 3)
    throw shape_error("expected [3,H,W] tensor, got " + shape_str(t.shape()));
  ImageU8 img;
  img.height = static_cast<int>(t.size(1));
  img.width = static_cast<int>(t.size(2));
  const int64_t hw = t.size(1) * t.size(2);
  img.rgb.resize(static_cast<size_t>(hw) * 3);
  for (int64_t i = 0; i < hw; ++i)
    for (int c = 0; c < 3; ++c) {
      const double v = std::clamp(t.data()[c * hw + i], -1.0, 1.0);
      img.rgb[i * 3 + c] = static_cast<uint8_t>(std::lround((v + 1.0) * 127.5));
    }
  return img;
}

ImageU8 tile_grid(const std::vector<ImageU8>& tiles, int cols) {
  if (tiles.empty() || cols < 1) throw value_error("grid needs tiles and at least one column");
  const int tw = tiles[0].width, th = tiles[0].height;
  for (const auto& t : tiles)
    if (t.width != tw || t.height != th) throw value_error("grid tiles must share one size");
  const int rows = (static_cast<int>(tiles.size()) + cols - 1) / cols;
  ImageU8 out;
  out.width = tw * cols;
  out.height = th * rows;
  out.rgb.assign(static_cast<size_t>(out.width) * out.height * 3, 0);
  for (size_t i = 0; i < tiles.size(); ++i) {
    const int r = static_cast<int>(i) / cols, c = static_cast<int>(i) % cols;
    for (int y = 0; y < th; ++y)
      std::copy_n(tiles[i].rgb.data() + static_cast<size_t>(y) * tw * 3, tw * 3,
                  out.rgb.data() +
                      ((static_cast<size_t>(r) * th + y) * out.width + static_cast<size_t>(c) * tw) * 3);
  }
  return out;
}

}  // namespace hyperstar
