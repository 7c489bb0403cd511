#include "hyperstar/losses.hpp"

#include <algorithm>

#include "hyperstar/ops.hpp"

namespace hyperstar {

Tensor adversarial_loss_d(const Tensor& real_logits, const Tensor& fake_logits) {
  Tensor ones = Tensor::full(real_logits.shape(), 1.0);
  Tensor zeros = Tensor::zeros(fake_logits.shape());
  return add(bce_with_logits(real_logits, ones), bce_with_logits(fake_logits, zeros));
}

Tensor adversarial_loss_g(const Tensor& fake_logits) {
  Tensor ones = Tensor::full(fake_logits.shape(), 1.0);
  return bce_with_logits(fake_logits, ones);
}

Tensor style_reconstruction_loss(const Tensor& target, const Tensor& recovered) {
  if (target.shape() != recovered.shape())
    throw shape_error("style codes differ in shape: " + shape_str(target.shape()) + " vs " +
                      shape_str(recovered.shape()));
  return l1_distance(target, recovered);
}

Tensor diversification_loss(const Tensor& img1, const Tensor& img2) {
  if (img1.shape() != img2.shape())
    throw shape_error("image shapes differ: " + shape_str(img1.shape()) + " vs " +
                      shape_str(img2.shape()));
  return l1_distance(img1, img2);
}

Tensor cycle_loss(const Tensor& x, const Tensor& reconstructed) {
  if (x.shape() != reconstructed.shape())
    throw shape_error("image shapes differ: " + shape_str(x.shape()) + " vs " +
                      shape_str(reconstructed.shape()));
  return l1_distance(x, reconstructed);
}

double lambda_ds_at(const TrainConfig& cfg, int64_t iter) {
  const double frac =
      1.0 - static_cast<double>(iter) / static_cast<double>(cfg.total_iters);
  return cfg.lambda_ds_init * std::max(0.0, frac);
}

Tensor image_content(const Tensor& img, int n) {
  // channel layouts: 1 = luminance, 2 = luminance + pad, 3 = RGB, 4 = RGB + pad
  if (n == 2) return narrow(img, 1, 0, 1);
  if (n == 4) return narrow(img, 1, 0, 3);
  return img;
}

}  // namespace hyperstar
