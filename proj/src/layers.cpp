#include "hyperstar/layers.hpp"

#include "hyperstar/algebra.hpp"
#include "hyperstar/ops.hpp"

namespace hyperstar {

ParamCount count_params(const std::vector<Param>& params) {
  ParamCount c;
  for (const auto& p : params) {
    c.by_layer.push_back({p.name, p.value.numel()});
    c.trainable += p.value.numel();
  }
  c.bytes_at_32bit = 4 * c.trainable;
  return c;
}

static void check_divisible(int64_t v, int n, const char* what) {
  if (n < 1) throw value_error("n must be >= 1");
  if (v % n != 0)
    throw shape_error(std::string(what) + " " + std::to_string(v) +
                      " not divisible by n=" + std::to_string(n));
}

DenseLayer::DenseLayer(int64_t in, int64_t out, std::mt19937_64& rng) {
  w = Tensor::zeros({out, in}, true);
  b = Tensor::zeros({out}, true);
  fill_xavier_normal(w, in, out, rng);
  snap_f32(w);
}

Tensor DenseLayer::forward(const Tensor& x) const { return linear(x, w, b); }

void DenseLayer::params(const std::string& prefix, std::vector<Param>& out) {
  out.push_back({prefix + ".w", w});
  out.push_back({prefix + ".b", b});
}

Conv2dLayer::Conv2dLayer(int64_t in_ch, int64_t out_ch, int ksize, int stride_, int pad_,
                         std::mt19937_64& rng)
    : stride(stride_), pad(pad_) {
  k = Tensor::zeros({out_ch, in_ch, ksize, ksize}, true);
  b = Tensor::zeros({out_ch}, true);
  fill_xavier_normal(k, in_ch * ksize * ksize, out_ch * ksize * ksize, rng);
  snap_f32(k);
}

Tensor Conv2dLayer::forward(const Tensor& x) const { return conv2d(x, k, b, stride, pad); }

void Conv2dLayer::params(const std::string& prefix, std::vector<Param>& out) {
  out.push_back({prefix + ".k", k});
  out.push_back({prefix + ".b", b});
}

PHMLayer::PHMLayer(int n, int64_t in, int64_t out, AScheme scheme, std::mt19937_64& rng,
                   bool train_a_)
    : train_a(train_a_), n_(n) {
  check_divisible(in, n, "input width");
  check_divisible(out, n, "output width");
  a = Tensor::zeros({n, n, n}, train_a);
  f = Tensor::zeros({n, out / n, in / n}, true);
  b = Tensor::zeros({out}, true);
  init_A(a, n, scheme, rng);
  fill_xavier_normal(f, in, out, rng);
  snap_f32(a);
  snap_f32(f);
}

Tensor PHMLayer::forward(const Tensor& x) const {
  if (x.ndim() != 2 || x.size(1) != in())
    throw shape_error("expected input [N," + std::to_string(in()) + "], got " +
                      shape_str(x.shape()));
  return linear(x, ph_compose_matrix(a, f), b);
}

void PHMLayer::params(const std::string& prefix, std::vector<Param>& out) {
  if (train_a) out.push_back({prefix + ".a", a});
  out.push_back({prefix + ".f", f});
  out.push_back({prefix + ".b", b});
}

void PHMLayer::state(const std::string& prefix, std::vector<Param>& out) {
  out.push_back({prefix + ".a", a});
  out.push_back({prefix + ".f", f});
  out.push_back({prefix + ".b", b});
}

PHCLayer::PHCLayer(int n, int64_t in_ch, int64_t out_ch, int ksize, int stride_, int pad_,
                   AScheme scheme, std::mt19937_64& rng, bool train_a_)
    : stride(stride_), pad(pad_), train_a(train_a_), n_(n) {
  check_divisible(in_ch, n, "input channels");
  check_divisible(out_ch, n, "output channels");
  a = Tensor::zeros({n, n, n}, train_a);
  f = Tensor::zeros({n, out_ch / n, in_ch / n, ksize, ksize}, true);
  b = Tensor::zeros({out_ch}, true);
  init_A(a, n, scheme, rng);
  fill_xavier_normal(f, in_ch * ksize * ksize, out_ch * ksize * ksize, rng);
  snap_f32(a);
  snap_f32(f);
}

Tensor PHCLayer::forward(const Tensor& x) const {
  return conv2d(x, ph_compose_conv(a, f), b, stride, pad);
}

void PHCLayer::params(const std::string& prefix, std::vector<Param>& out) {
  if (train_a) out.push_back({prefix + ".a", a});
  out.push_back({prefix + ".f", f});
  out.push_back({prefix + ".b", b});
}

void PHCLayer::state(const std::string& prefix, std::vector<Param>& out) {
  out.push_back({prefix + ".a", a});
  out.push_back({prefix + ".f", f});
  out.push_back({prefix + ".b", b});
}

QuaternionConvLayer::QuaternionConvLayer(int64_t in_ch, int64_t out_ch, int ksize, int stride_,
                                         int pad_, std::mt19937_64& rng)
    : stride(stride_), pad(pad_) {
  check_divisible(in_ch, 4, "input channels");
  check_divisible(out_ch, 4, "output channels");
  f = Tensor::zeros({4, out_ch / 4, in_ch / 4, ksize, ksize}, true);
  b = Tensor::zeros({out_ch}, true);
  fill_xavier_normal(f, in_ch * ksize * ksize, out_ch * ksize * ksize, rng);
  snap_f32(f);
}

Tensor QuaternionConvLayer::forward(const Tensor& x) const {
  return conv2d(x, quaternion_conv_kernel(f), b, stride, pad);
}

void QuaternionConvLayer::params(const std::string& prefix, std::vector<Param>& out) {
  out.push_back({prefix + ".f", f});
  out.push_back({prefix + ".b", b});
}

}  // namespace hyperstar
