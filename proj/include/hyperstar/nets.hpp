#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hyperstar/layers.hpp"
#include "hyperstar/norm.hpp"
#include "hyperstar/tensor.hpp"

namespace hyperstar {

struct TrainConfig {
  int n = 4;
  int image_size = 32;
  int64_t channels_base = 32;
  int64_t channels_max = 128;
  int num_domains = 2;
  int64_t latent_dim = 16;
  int64_t style_dim = 64;
  int batch = 8;
  double lambda_sty = 1.0;
  double lambda_cyc = 1.0;
  double lambda_ds_init = 1.0;
  int64_t total_iters = 2000;
  double lr = 1e-4;
  double lr_mapping = 1e-6;
  double adam_beta1 = 0.0;
  double adam_beta2 = 0.99;
  uint64_t seed = 0;

  // Build-time switches, not config-file fields: checkpoint metadata carries
  // them so saved models stay self-describing.
  AScheme a_scheme = AScheme::rand_integer;
  bool freeze_a = false;  // fixed Hamilton pattern (quaternion variant)
  VarDivisor var_div = VarDivisor::spatial;

  void validate() const;  // throws value_error with guidance
  // Full-scale topology used for parameter accounting.
  static TrainConfig full_preset(int n);
};

// Width adapted to the algebra: next multiple of n.
int64_t fit_channels(const TrainConfig& cfg, int64_t width);

// One-hot domain rows, [N, num_domains].
Tensor one_hot(const std::vector<int>& labels, int num_domains);

// Dispatch between plain and synthesized-weight layers on n.
class HConv {
 public:
  HConv() = default;
  HConv(const TrainConfig& cfg, int64_t in_ch, int64_t out_ch, int ksize, int stride, int pad,
        std::mt19937_64& rng);
  Tensor forward(const Tensor& x) const;
  void params(const std::string& prefix, std::vector<Param>& out);
  void state(const std::string& prefix, std::vector<Param>& out);

  int n = 1;
  Conv2dLayer real;
  PHCLayer ph;
};

class HDense {
 public:
  HDense() = default;
  HDense(const TrainConfig& cfg, int64_t in, int64_t out, std::mt19937_64& rng);
  int64_t in() const { return n == 1 ? real.in() : ph.in(); }
  Tensor forward(const Tensor& x) const;
  void params(const std::string& prefix, std::vector<Param>& out);
  void state(const std::string& prefix, std::vector<Param>& out);

  int n = 1;
  DenseLayer real;
  PHMLayer ph;
};

// Residual block: optional per-block normalization, optional 2x average
// pooling, shortcut projection when channel widths differ; sum scaled by
// 1/sqrt(2) to keep unit variance.
class ResBlk {
 public:
  ResBlk() = default;
  ResBlk(const TrainConfig& cfg, int64_t in_ch, int64_t out_ch, bool pool, bool normed,
         std::mt19937_64& rng);
  Tensor forward(const Tensor& x) const;
  void params(const std::string& prefix, std::vector<Param>& out);
  void state(const std::string& prefix, std::vector<Param>& out);

  HINLayer norm1, norm2;
  HConv conv1, conv2, sc;
  bool pool = false, normed = false, learned_sc = false;
};

// Style-conditioned residual block with optional nearest upsampling.
class AdaResBlk {
 public:
  AdaResBlk() = default;
  AdaResBlk(const TrainConfig& cfg, int64_t in_ch, int64_t out_ch, bool upsample,
            std::mt19937_64& rng);
  Tensor forward(const Tensor& x, const Tensor& style) const;
  void params(const std::string& prefix, std::vector<Param>& out);
  void state(const std::string& prefix, std::vector<Param>& out);

  HAdaINLayer ada1, ada2;
  HConv conv1, conv2, sc;
  bool up = false, learned_sc = false;
};

class Generator {
 public:
  Generator() = default;
  Generator(const TrainConfig& cfg, std::mt19937_64& rng);
  // x: [N, n, S, S] in [-1,1], style: [N, style_dim] -> [N, n, S, S] in (-1,1)
  Tensor forward(const Tensor& x, const Tensor& style) const;
  void params(const std::string& prefix, std::vector<Param>& out);
  void state(const std::string& prefix, std::vector<Param>& out);

  HConv from_rgb;
  std::vector<ResBlk> encode;
  std::vector<AdaResBlk> decode;
  HINLayer out_norm;
  HConv to_rgb;
};

class MappingNetwork {
 public:
  MappingNetwork() = default;
  MappingNetwork(const TrainConfig& cfg, std::mt19937_64& rng);
  // z: [N, latent_dim], domain one-hot: [N, D] -> style [N, style_dim]
  Tensor forward(const Tensor& z, const Tensor& domains) const;
  void params(const std::string& prefix, std::vector<Param>& out);
  void state(const std::string& prefix, std::vector<Param>& out);

  std::vector<HDense> shared;                  // ReLU after each
  std::vector<std::vector<HDense>> branches;   // ReLU after all but the last
  int64_t style_dim = 64;
};

class StyleEncoder {
 public:
  StyleEncoder() = default;
  StyleEncoder(const TrainConfig& cfg, std::mt19937_64& rng);
  Tensor forward(const Tensor& x, const Tensor& domains) const;  // -> [N, style_dim]
  void params(const std::string& prefix, std::vector<Param>& out);
  void state(const std::string& prefix, std::vector<Param>& out);

  HConv from_rgb;
  std::vector<ResBlk> trunk;  // unnormalized, all pooling
  HConv final_conv;           // valid conv collapsing the remaining 2x2 window
  std::vector<HDense> heads;  // per-domain
  int64_t style_dim = 64;
};

class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(const TrainConfig& cfg, std::mt19937_64& rng);
  Tensor forward(const Tensor& x, const Tensor& domains) const;  // -> [N, 1] logits
  void params(const std::string& prefix, std::vector<Param>& out);
  void state(const std::string& prefix, std::vector<Param>& out);

  HConv from_rgb;
  std::vector<ResBlk> trunk;
  HConv final_conv;
  std::vector<DenseLayer> heads;  // plain dense: one real logit per domain
};

struct ModelBundle {
  TrainConfig cfg;
  Generator g;
  MappingNetwork m;
  StyleEncoder s;
  Discriminator d;

  explicit ModelBundle(const TrainConfig& cfg);
  std::vector<Param> g_params();
  std::vector<Param> m_params();
  std::vector<Param> s_params();
  std::vector<Param> d_params();
  std::vector<Param> all_params();
  std::vector<Param> all_state();  // includes frozen algebra tensors
};

}  // namespace hyperstar
