#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperstar/tensor.hpp"

namespace hyperstar {

struct ImageU8 {
  int width = 0, height = 0;
  std::vector<uint8_t> rgb;  // row-major, 3 bytes per pixel
};

ImageU8 read_png(const std::string& path);  // throws value_error on decode failure
void write_png(const std::string& path, const ImageU8& img);

ImageU8 resize_bilinear(const ImageU8& img, int out_w, int out_h);

// [0,255] bytes <-> [-1,1] float tensor, shape [3,H,W].
Tensor image_to_tensor(const ImageU8& img);
ImageU8 tensor_to_image(const Tensor& t);  // clamps to [-1,1]

// Tile equally sized images into a grid, row-major, `cols` per row.
ImageU8 tile_grid(const std::vector<ImageU8>& tiles, int cols);

}  // namespace hyperstar
