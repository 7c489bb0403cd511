#pragma once

#include <random>
#include <string>
#include <vector>

#include "hyperstar/init.hpp"
#include "hyperstar/tensor.hpp"

namespace hyperstar {

struct Param {
  std::string name;
  Tensor value;
};

struct CountRow {
  std::string name;
  int64_t count;
};

struct ParamCount {
  int64_t trainable = 0;
  std::vector<CountRow> by_layer;
  int64_t bytes_at_32bit = 0;
};

// Exact enumeration of trainable scalars plus the 4-bytes-per-parameter
// storage figure used in reports.
ParamCount count_params(const std::vector<Param>& params);

// Plain fully connected layer: y = x Wᵀ + b.
class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(int64_t in, int64_t out, std::mt19937_64& rng);
  Tensor forward(const Tensor& x) const;
  void params(const std::string& prefix, std::vector<Param>& out);
  int64_t in() const { return w.size(1); }
  int64_t out() const { return w.size(0); }

  Tensor w, b;
};

// Plain convolution layer.
class Conv2dLayer {
 public:
  Conv2dLayer() = default;
  Conv2dLayer(int64_t in_ch, int64_t out_ch, int ksize, int stride, int pad,
              std::mt19937_64& rng);
  Tensor forward(const Tensor& x) const;
  void params(const std::string& prefix, std::vector<Param>& out);

  Tensor k, b;
  int stride = 1, pad = 0;
};

// Fully connected layer whose weight matrix is synthesized as sum_i A_i ⊗ F_i.
// in and out must be divisible by n; the builder rounds widths beforehand.
class PHMLayer {
 public:
  PHMLayer() = default;
  PHMLayer(int n, int64_t in, int64_t out, AScheme scheme, std::mt19937_64& rng,
           bool train_a = true);
  Tensor forward(const Tensor& x) const;
  void params(const std::string& prefix, std::vector<Param>& out);  // trainable only
  void state(const std::string& prefix, std::vector<Param>& out);   // includes frozen a
  int64_t in() const { return n_ * f.size(2); }
  int64_t out() const { return n_ * f.size(1); }

  Tensor a, f, b;
  bool train_a = true;

 private:
  int n_ = 1;
};

// Convolution layer with a synthesized kernel; O and C divisible by n.
class PHCLayer {
 public:
  PHCLayer() = default;
  PHCLayer(int n, int64_t in_ch, int64_t out_ch, int ksize, int stride, int pad, AScheme scheme,
           std::mt19937_64& rng, bool train_a = true);
  Tensor forward(const Tensor& x) const;
  void params(const std::string& prefix, std::vector<Param>& out);
  void state(const std::string& prefix, std::vector<Param>& out);
  int64_t in() const { return n_ * f.size(2); }
  int64_t out() const { return n_ * f.size(1); }

  Tensor a, f, b;
  int stride = 1, pad = 0;
  bool train_a = true;

 private:
  int n_ = 1;
};

// Convolution over quaternion feature maps with the fixed Hamilton sign
// pattern; the pattern itself carries no trainable weights.
class QuaternionConvLayer {
 public:
  QuaternionConvLayer() = default;
  QuaternionConvLayer(int64_t in_ch, int64_t out_ch, int ksize, int stride, int pad,
                      std::mt19937_64& rng);
  Tensor forward(const Tensor& x) const;
  void params(const std::string& prefix, std::vector<Param>& out);

  Tensor f, b;  // f: [4, O/4, C/4, kh, kw]
  int stride = 1, pad = 0;
};

}  // namespace hyperstar
