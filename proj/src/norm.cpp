#include "hyperstar/norm.hpp"

#include "hyperstar/ops.hpp"

namespace hyperstar {

int64_t round_up(int64_t v, int64_t multiple) {
  return (v + multiple - 1) / multiple * multiple;
}

Tensor fit_width(const Tensor& x, int64_t want) {
  const int64_t have = x.size(1);
  if (have == want) return x;
  if (have < want) return pad_dim_end(x, 1, want - have);
  return narrow(x, 1, 0, want);
}

namespace {

struct GroupedStats {
  Tensor centered;  // [N, Cb, g, HW]
  Tensor inv_std;   // [N, Cb, 1, 1]
};

GroupedStats grouped_whiten(const Tensor& x, int group, double eps, VarDivisor div) {
  if (x.ndim() != 4) throw shape_error("expected [N,C,H,W], got " + shape_str(x.shape()));
  const int64_t N = x.size(0), C = x.size(1), H = x.size(2), W = x.size(3);
  if (group < 1 || C % group != 0)
    throw shape_error("channels " + std::to_string(C) + " not divisible by group " +
                      std::to_string(group));
  const int64_t Cb = C / group;
  Tensor xr = reshape(x, {N, Cb, group, H * W});
  Tensor mu = mean_axes(xr, {3});
  Tensor d = sub(xr, mu);
  Tensor var = mean_axes(mul(d, d), {2, 3});
  if (div == VarDivisor::spatial && group > 1)
    var = scalar_mul(var, static_cast<double>(group));
  Tensor inv = divide(Tensor::scalar(1.0), sqrt_op(add_scalar(var, eps)));
  return {std::move(d), std::move(inv)};
}

}  // namespace

Tensor instance_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  const int64_t C = x.size(1);
  if (gamma.numel() != C || beta.numel() != C)
    throw shape_error("affine parameters must have one entry per channel");
  GroupedStats s = grouped_whiten(x, 1, eps, VarDivisor::spatial);
  Tensor y = mul(s.centered, s.inv_std);
  y = add(mul(y, reshape(gamma, {1, C, 1, 1})), reshape(beta, {1, C, 1, 1}));
  return reshape(y, x.shape());
}

Tensor hyper_instance_norm(const Tensor& x, int group, const Tensor& gamma, const Tensor& beta,
                           double eps, VarDivisor div) {
  const int64_t C = x.size(1);
  const int64_t Cb = C / group;
  if (gamma.numel() != Cb)
    throw shape_error("gamma must have one entry per channel block, got " +
                      shape_str(gamma.shape()));
  if (beta.numel() != C)
    throw shape_error("beta must have one entry per channel, got " + shape_str(beta.shape()));
  GroupedStats s = grouped_whiten(x, group, eps, div);
  Tensor y = mul(s.centered, s.inv_std);
  y = mul(y, reshape(gamma, {1, Cb, 1, 1}));
  y = add(y, reshape(beta, {1, Cb, group, 1}));
  return reshape(y, x.shape());
}

Tensor hyper_adain(const Tensor& x, int group, const Tensor& raw_scale, const Tensor& shift,
                   double eps, VarDivisor div) {
  const int64_t N = x.size(0), C = x.size(1);
  const int64_t Cb = C / group;
  if (raw_scale.ndim() != 2 || raw_scale.size(0) != N || raw_scale.size(1) != Cb)
    throw shape_error("raw_scale must be [N," + std::to_string(Cb) + "], got " +
                      shape_str(raw_scale.shape()));
  if (shift.ndim() != 2 || shift.size(0) != N || shift.size(1) != C)
    throw shape_error("shift must be [N," + std::to_string(C) + "], got " +
                      shape_str(shift.shape()));
  GroupedStats s = grouped_whiten(x, group, eps, div);
  Tensor y = mul(s.centered, s.inv_std);
  Tensor scale = add_scalar(reshape(raw_scale, {N, Cb, 1, 1}), 1.0);
  y = mul(y, scale);
  y = add(y, reshape(shift, {N, Cb, group, 1}));
  return reshape(y, x.shape());
}

HINLayer::HINLayer(int group_, int64_t channels, VarDivisor div_) : group(group_), div(div_) {
  gamma = Tensor::full({channels / group_}, 1.0, true);
  beta = Tensor::zeros({channels}, true);
}

Tensor HINLayer::forward(const Tensor& x) const {
  if (group == 1) return instance_norm(x, gamma, beta, eps);
  return hyper_instance_norm(x, group, gamma, beta, eps, div);
}

void HINLayer::params(const std::string& prefix, std::vector<Param>& out) {
  out.push_back({prefix + ".gamma", gamma});
  out.push_back({prefix + ".beta", beta});
}

HAdaINLayer::HAdaINLayer(int n, int group_, int64_t channels_, int64_t style_dim_, AScheme scheme,
                         std::mt19937_64& rng, VarDivisor div_, bool train_a)
    : group(group_), channels(channels_), style_dim(style_dim_), div(div_) {
  const int64_t want = channels_ / group_ + channels_;
  if (n == 1) {
    proj = PHMLayer(1, style_dim_, want, scheme, rng, train_a);
  } else {
    proj = PHMLayer(n, round_up(style_dim_, n), round_up(want, n), scheme, rng, train_a);
  }
}

Tensor HAdaINLayer::forward(const Tensor& x, const Tensor& style) const {
  const int64_t Cb = channels / group;
  Tensor p = proj.forward(fit_width(style, proj.in()));
  Tensor raw = narrow(p, 1, 0, Cb);
  Tensor shift = narrow(p, 1, Cb, channels);
  return hyper_adain(x, group, raw, shift, eps, div);
}

void HAdaINLayer::params(const std::string& prefix, std::vector<Param>& out) {
  proj.params(prefix + ".proj", out);
}

void HAdaINLayer::state(const std::string& prefix, std::vector<Param>& out) {
  proj.state(prefix + ".proj", out);
}

}  // namespace hyperstar
