#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperstar/tensor.hpp"

namespace hyperstar {

// In-memory dataset. Images are stored as RGB content in [-1,1] regardless of
// the model's channel count n; to_model_channels adapts a batch to n.
struct Dataset {
  std::vector<Tensor> images;       // each [3,S,S]
  std::vector<int64_t> labels;      // domain index per image
  std::vector<std::vector<int64_t>> by_domain;  // image indices grouped by domain
  int64_t num_domains = 0;
  int64_t image_size = 0;

  int64_t size() const { return static_cast<int64_t>(images.size()); }
};

// Deterministic procedural dataset: per-domain hue, randomized simple shapes.
Dataset generate_synthetic_dataset(int64_t num_domains, int64_t image_size,
                                   int64_t count, uint64_t seed);

// Loads root/<domain>/*.png with domains ordered lexicographically by
// directory name and files lexicographically within each. Unreadable files
// are skipped with a warning on stderr; a domain directory that yields no
// images is an error. Images are resized to image_size.
Dataset load_image_folder(const std::string& root, int64_t image_size);

// RGB content [B,3,S,S] -> model layout [B,n,S,S]:
//   n=1 luminance, n=2 [luma, 0], n=3 RGB, n=4 [R,G,B, 0].
Tensor to_model_channels(const Tensor& rgb, int64_t n);

// Model layout [B,n,S,S] -> RGB [B,3,S,S] (inverse of the above; the
// luminance layouts replicate the single channel).
Tensor to_rgb_channels(const Tensor& x, int64_t n);

// Stacks the given dataset images into [B,3,S,S].
Tensor stack_images(const Dataset& ds, const std::vector<int64_t>& indices);

}  // namespace hyperstar
