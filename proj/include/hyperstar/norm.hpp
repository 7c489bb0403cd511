#pragma once

#include <random>

#include "hyperstar/layers.hpp"
#include "hyperstar/tensor.hpp"

namespace hyperstar {

// Divisor for the pooled variance of grouped channels: the sum of squared
// component deviations over HW spatial positions divided by HW, or by
// group·HW (averaging the per-component variances instead of summing them).
enum class VarDivisor { spatial, spatial_x_components };

// Per-(sample, channel) spatial whitening with affine parameters.
Tensor instance_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                     double eps = 1e-5);

// Grouped variant: channels come in blocks of `group` interleaved components.
// Each component is centered by its own spatial mean; all components of a
// block share one pooled variance. gamma has one scalar per block, beta one
// value per channel.
Tensor hyper_instance_norm(const Tensor& x, int group, const Tensor& gamma, const Tensor& beta,
                           double eps = 1e-5, VarDivisor div = VarDivisor::spatial);

// Style-conditioned variant: content statistics as in hyper_instance_norm,
// then scale (1 + raw_scale) per block and shift per channel, both computed
// from a style code by the caller. raw_scale: [N, C/group], shift: [N, C].
Tensor hyper_adain(const Tensor& x, int group, const Tensor& raw_scale, const Tensor& shift,
                   double eps = 1e-5, VarDivisor div = VarDivisor::spatial);

class HINLayer {
 public:
  HINLayer() = default;
  HINLayer(int group, int64_t channels, VarDivisor div = VarDivisor::spatial);
  Tensor forward(const Tensor& x) const;
  void params(const std::string& prefix, std::vector<Param>& out);

  Tensor gamma, beta;
  int group = 1;
  VarDivisor div = VarDivisor::spatial;
  double eps = 1e-5;
};

// Projects a style code to per-block scales and per-channel shifts through a
// synthesized-weight dense layer, then applies hyper_adain.
class HAdaINLayer {
 public:
  HAdaINLayer() = default;
  HAdaINLayer(int n, int group, int64_t channels, int64_t style_dim, AScheme scheme,
              std::mt19937_64& rng, VarDivisor div = VarDivisor::spatial, bool train_a = true);
  Tensor forward(const Tensor& x, const Tensor& style) const;
  void params(const std::string& prefix, std::vector<Param>& out);
  void state(const std::string& prefix, std::vector<Param>& out);

  PHMLayer proj;
  int group = 1;
  int64_t channels = 0;
  int64_t style_dim = 0;
  VarDivisor div = VarDivisor::spatial;
  double eps = 1e-5;
};

// Widths at fixed external boundaries (latent codes, style codes, logits) are
// not always multiples of n; pad with zeros or slice to fit.
Tensor fit_width(const Tensor& x, int64_t want);
int64_t round_up(int64_t v, int64_t multiple);

}  // namespace hyperstar
