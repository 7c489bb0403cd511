#pragma once

#include "hyperstar/nets.hpp"
#include "hyperstar/tensor.hpp"

namespace hyperstar {

// Non-saturating GAN losses on logits, mean-reduced over the batch.
Tensor adversarial_loss_d(const Tensor& real_logits, const Tensor& fake_logits);
Tensor adversarial_loss_g(const Tensor& fake_logits);

// Mean L1 distances.
Tensor style_reconstruction_loss(const Tensor& target, const Tensor& recovered);
Tensor diversification_loss(const Tensor& img1, const Tensor& img2);
Tensor cycle_loss(const Tensor& x, const Tensor& reconstructed);

// Linear decay to zero across total_iters; iter is 1-based.
double lambda_ds_at(const TrainConfig& cfg, int64_t iter);

// View of an image batch restricted to the channels that carry pixel content
// (zero-pad channels excluded from image-space losses).
Tensor image_content(const Tensor& img, int n);

}  // namespace hyperstar
