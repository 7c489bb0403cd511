#include "hyperstar/nets.hpp"

#include <cmath>

#include "hyperstar/ops.hpp"

namespace hyperstar {

namespace {

constexpr double kResScale = 0.7071067811865476;  // 1/sqrt(2)

bool power_of_two(int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_int(int64_t v) {
  int r = 0;
  while (v > 1) {
    v >>= 1;
    ++r;
  }
  return r;
}

}  // namespace

void TrainConfig::validate() const {
  if (n < 1 || n > 4)
    throw value_error("n=" + std::to_string(n) +
                      " unsupported: every layer width must be divisible by n and images "
                      "supply at most 4 channels (RGB plus one zero pad), so n must be "
                      "1, 2, 3 or 4");
  if (!power_of_two(image_size) || image_size < 8)
    throw value_error("image_size must be a power of two >= 8, got " +
                      std::to_string(image_size));
  if (channels_base < 1 || channels_max < channels_base)
    throw value_error("need 1 <= channels_base <= channels_max");
  if (num_domains < 2) throw value_error("num_domains must be >= 2");
  if (latent_dim < 1 || style_dim < 1) throw value_error("latent_dim and style_dim must be >= 1");
  if (batch < 1) throw value_error("batch must be >= 1");
  if (total_iters < 1) throw value_error("total_iters must be >= 1");
  if (lr <= 0 || lr_mapping <= 0) throw value_error("learning rates must be positive");
  if (adam_beta1 < 0 || adam_beta1 >= 1 || adam_beta2 < 0 || adam_beta2 >= 1)
    throw value_error("adam betas must lie in [0,1)");
  if (lambda_sty < 0 || lambda_cyc < 0 || lambda_ds_init < 0)
    throw value_error("loss weights must be non-negative");
  if (freeze_a && (n != 4 || a_scheme != AScheme::quat_pattern))
    throw value_error("freezing the algebra requires n=4 with the quat_pattern scheme");
}

TrainConfig TrainConfig::full_preset(int n_) {
  TrainConfig cfg;
  cfg.n = n_;
  cfg.image_size = 128;
  cfg.channels_base = 64;
  cfg.channels_max = 512;
  cfg.total_iters = 100000;
  return cfg;
}

int64_t fit_channels(const TrainConfig& cfg, int64_t width) {
  return cfg.n == 1 ? width : round_up(width, cfg.n);
}

Tensor one_hot(const std::vector<int>& labels, int num_domains) {
  Tensor t = Tensor::zeros({static_cast<int64_t>(labels.size()), num_domains});
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_domains)
      throw value_error("domain label " + std::to_string(labels[i]) + " out of range [0," +
                        std::to_string(num_domains) + ")");
    t.data()[i * num_domains + labels[i]] = 1.0;
  }
  return t;
}

HConv::HConv(const TrainConfig& cfg, int64_t in_ch, int64_t out_ch, int ksize, int stride,
             int pad, std::mt19937_64& rng)
    : n(cfg.n) {
  if (n == 1)
    real = Conv2dLayer(in_ch, out_ch, ksize, stride, pad, rng);
  else
    ph = PHCLayer(n, in_ch, out_ch, ksize, stride, pad, cfg.a_scheme, rng, !cfg.freeze_a);
}

Tensor HConv::forward(const Tensor& x) const {
  return n == 1 ? real.forward(x) : ph.forward(x);
}

void HConv::params(const std::string& prefix, std::vector<Param>& out) {
  if (n == 1)
    real.params(prefix, out);
  else
    ph.params(prefix, out);
}

void HConv::state(const std::string& prefix, std::vector<Param>& out) {
  if (n == 1)
    real.params(prefix, out);
  else
    ph.state(prefix, out);
}

HDense::HDense(const TrainConfig& cfg, int64_t in, int64_t out, std::mt19937_64& rng)
    : n(cfg.n) {
  if (n == 1)
    real = DenseLayer(in, out, rng);
  else
    ph = PHMLayer(n, in, out, cfg.a_scheme, rng, !cfg.freeze_a);
}

Tensor HDense::forward(const Tensor& x) const {
  return n == 1 ? real.forward(x) : ph.forward(x);
}

void HDense::params(const std::string& prefix, std::vector<Param>& out) {
  if (n == 1)
    real.params(prefix, out);
  else
    ph.params(prefix, out);
}

void HDense::state(const std::string& prefix, std::vector<Param>& out) {
  if (n == 1)
    real.params(prefix, out);
  else
    ph.state(prefix, out);
}

ResBlk::ResBlk(const TrainConfig& cfg, int64_t in_ch, int64_t out_ch, bool pool_, bool normed_,
               std::mt19937_64& rng)
    : pool(pool_), normed(normed_), learned_sc(in_ch != out_ch) {
  const int group = cfg.n;
  if (normed) {
    norm1 = HINLayer(group, in_ch, cfg.var_div);
    norm2 = HINLayer(group, in_ch, cfg.var_div);
  }
  conv1 = HConv(cfg, in_ch, in_ch, 3, 1, 1, rng);
  conv2 = HConv(cfg, in_ch, out_ch, 3, 1, 1, rng);
  if (learned_sc) sc = HConv(cfg, in_ch, out_ch, 1, 1, 0, rng);
}

Tensor ResBlk::forward(const Tensor& x) const {
  Tensor h = x;
  if (normed) h = norm1.forward(h);
  h = leaky_relu(h, 0.2);
  h = conv1.forward(h);
  if (pool) h = avg_pool2d(h);
  if (normed) h = norm2.forward(h);
  h = leaky_relu(h, 0.2);
  h = conv2.forward(h);
  Tensor s = x;
  if (learned_sc) s = sc.forward(s);
  if (pool) s = avg_pool2d(s);
  return scalar_mul(add(h, s), kResScale);
}

void ResBlk::params(const std::string& prefix, std::vector<Param>& out) {
  if (normed) {
    norm1.params(prefix + ".norm1", out);
    norm2.params(prefix + ".norm2", out);
  }
  conv1.params(prefix + ".conv1", out);
  conv2.params(prefix + ".conv2", out);
  if (learned_sc) sc.params(prefix + ".sc", out);
}

void ResBlk::state(const std::string& prefix, std::vector<Param>& out) {
  if (normed) {
    norm1.params(prefix + ".norm1", out);
    norm2.params(prefix + ".norm2", out);
  }
  conv1.state(prefix + ".conv1", out);
  conv2.state(prefix + ".conv2", out);
  if (learned_sc) sc.state(prefix + ".sc", out);
}

AdaResBlk::AdaResBlk(const TrainConfig& cfg, int64_t in_ch, int64_t out_ch, bool upsample,
                     std::mt19937_64& rng)
    : up(upsample), learned_sc(in_ch != out_ch) {
  const int group = cfg.n;
  ada1 = HAdaINLayer(cfg.n, group, in_ch, cfg.style_dim, cfg.a_scheme, rng, cfg.var_div,
                     !cfg.freeze_a);
  ada2 = HAdaINLayer(cfg.n, group, out_ch, cfg.style_dim, cfg.a_scheme, rng, cfg.var_div,
                     !cfg.freeze_a);
  conv1 = HConv(cfg, in_ch, out_ch, 3, 1, 1, rng);
  conv2 = HConv(cfg, out_ch, out_ch, 3, 1, 1, rng);
  if (learned_sc) sc = HConv(cfg, in_ch, out_ch, 1, 1, 0, rng);
}

Tensor AdaResBlk::forward(const Tensor& x, const Tensor& style) const {
  Tensor h = ada1.forward(x, style);
  h = leaky_relu(h, 0.2);
  if (up) h = upsample_nearest2(h);
  h = conv1.forward(h);
  h = ada2.forward(h, style);
  h = leaky_relu(h, 0.2);
  h = conv2.forward(h);
  Tensor s = x;
  if (up) s = upsample_nearest2(s);
  if (learned_sc) s = sc.forward(s);
  return scalar_mul(add(h, s), kResScale);
}

void AdaResBlk::params(const std::string& prefix, std::vector<Param>& out) {
  ada1.params(prefix + ".ada1", out);
  ada2.params(prefix + ".ada2", out);
  conv1.params(prefix + ".conv1", out);
  conv2.params(prefix + ".conv2", out);
  if (learned_sc) sc.params(prefix + ".sc", out);
}

void AdaResBlk::state(const std::string& prefix, std::vector<Param>& out) {
  ada1.state(prefix + ".ada1", out);
  ada2.state(prefix + ".ada2", out);
  conv1.state(prefix + ".conv1", out);
  conv2.state(prefix + ".conv2", out);
  if (learned_sc) sc.state(prefix + ".sc", out);
}

Generator::Generator(const TrainConfig& cfg, std::mt19937_64& rng) {
  const int64_t base = fit_channels(cfg, cfg.channels_base);
  const int64_t cmax = fit_channels(cfg, cfg.channels_max);
  const int down = log2_int(cfg.image_size) - 2;
  if (down < 1)
    throw value_error("spatial underflow: image_size " + std::to_string(cfg.image_size) +
                      " leaves no room for the pooling stages");

  from_rgb = HConv(cfg, cfg.n, base, 3, 1, 1, rng);
  std::vector<std::pair<int64_t, int64_t>> up_dims;  // deepest first after reversal
  int64_t din = base;
  for (int i = 0; i < down; ++i) {
    const int64_t dout = fit_channels(cfg, std::min(din * 2, cmax));
    encode.emplace_back(cfg, din, dout, /*pool=*/true, /*normed=*/true, rng);
    up_dims.emplace_back(dout, din);
    din = dout;
  }
  for (int i = 0; i < 2; ++i)
    encode.emplace_back(cfg, din, din, /*pool=*/false, /*normed=*/true, rng);

  for (int i = 0; i < 2; ++i) decode.emplace_back(cfg, din, din, /*upsample=*/false, rng);
  for (auto it = up_dims.rbegin(); it != up_dims.rend(); ++it)
    decode.emplace_back(cfg, it->first, it->second, /*upsample=*/true, rng);

  out_norm = HINLayer(cfg.n, base, cfg.var_div);
  to_rgb = HConv(cfg, base, cfg.n, 1, 1, 0, rng);
}

Tensor Generator::forward(const Tensor& x, const Tensor& style) const {
  Tensor h = from_rgb.forward(x);
  for (const auto& blk : encode) h = blk.forward(h);
  for (const auto& blk : decode) h = blk.forward(h, style);
  h = out_norm.forward(h);
  h = leaky_relu(h, 0.2);
  h = to_rgb.forward(h);
  return tanh_op(h);
}

void Generator::params(const std::string& prefix, std::vector<Param>& out) {
  from_rgb.params(prefix + ".from_rgb", out);
  for (size_t i = 0; i < encode.size(); ++i)
    encode[i].params(prefix + ".encode" + std::to_string(i), out);
  for (size_t i = 0; i < decode.size(); ++i)
    decode[i].params(prefix + ".decode" + std::to_string(i), out);
  out_norm.params(prefix + ".out_norm", out);
  to_rgb.params(prefix + ".to_rgb", out);
}

void Generator::state(const std::string& prefix, std::vector<Param>& out) {
  from_rgb.state(prefix + ".from_rgb", out);
  for (size_t i = 0; i < encode.size(); ++i)
    encode[i].state(prefix + ".encode" + std::to_string(i), out);
  for (size_t i = 0; i < decode.size(); ++i)
    decode[i].state(prefix + ".decode" + std::to_string(i), out);
  out_norm.params(prefix + ".out_norm", out);
  to_rgb.state(prefix + ".to_rgb", out);
}

MappingNetwork::MappingNetwork(const TrainConfig& cfg, std::mt19937_64& rng)
    : style_dim(cfg.style_dim) {
  const int64_t hidden = fit_channels(cfg, cfg.channels_max);
  const int64_t zin = fit_channels(cfg, cfg.latent_dim);
  const int64_t sout = fit_channels(cfg, cfg.style_dim);
  shared.emplace_back(cfg, zin, hidden, rng);
  for (int i = 0; i < 3; ++i) shared.emplace_back(cfg, hidden, hidden, rng);
  branches.resize(cfg.num_domains);
  for (int d = 0; d < cfg.num_domains; ++d) {
    for (int i = 0; i < 3; ++i) branches[d].emplace_back(cfg, hidden, hidden, rng);
    branches[d].emplace_back(cfg, hidden, sout, rng);
  }
}

Tensor MappingNetwork::forward(const Tensor& z, const Tensor& domains) const {
  Tensor h = fit_width(z, shared[0].in());
  for (const auto& l : shared) h = relu(l.forward(h));
  Tensor out;
  for (size_t d = 0; d < branches.size(); ++d) {
    Tensor b = h;
    for (size_t i = 0; i + 1 < branches[d].size(); ++i) b = relu(branches[d][i].forward(b));
    b = branches[d].back().forward(b);
    Tensor masked = mul(b, narrow(domains, 1, static_cast<int64_t>(d), 1));
    out = d == 0 ? masked : add(out, masked);
  }
  return fit_width(out, style_dim);
}

void MappingNetwork::params(const std::string& prefix, std::vector<Param>& out) {
  for (size_t i = 0; i < shared.size(); ++i)
    shared[i].params(prefix + ".shared" + std::to_string(i), out);
  for (size_t d = 0; d < branches.size(); ++d)
    for (size_t i = 0; i < branches[d].size(); ++i)
      branches[d][i].params(prefix + ".branch" + std::to_string(d) + "." + std::to_string(i),
                            out);
}

void MappingNetwork::state(const std::string& prefix, std::vector<Param>& out) {
  for (size_t i = 0; i < shared.size(); ++i)
    shared[i].state(prefix + ".shared" + std::to_string(i), out);
  for (size_t d = 0; d < branches.size(); ++d)
    for (size_t i = 0; i < branches[d].size(); ++i)
      branches[d][i].state(prefix + ".branch" + std::to_string(d) + "." + std::to_string(i),
                           out);
}

namespace {

// Shared trunk recipe for the style encoder and discriminator: initial conv,
// log2(size)-1 pooling residual blocks without normalization, then a valid
// conv collapsing the final 2x2 window.
struct TrunkDims {
  int blocks;
  int64_t last;
};

TrunkDims build_trunk(const TrainConfig& cfg, std::vector<ResBlk>& trunk, std::mt19937_64& rng) {
  const int64_t base = fit_channels(cfg, cfg.channels_base);
  const int64_t cmax = fit_channels(cfg, cfg.channels_max);
  const int blocks = log2_int(cfg.image_size) - 1;
  if (blocks < 1)
    throw value_error("spatial underflow: image_size " + std::to_string(cfg.image_size) +
                      " leaves no room for the pooling stages");
  int64_t din = base;
  for (int i = 0; i < blocks; ++i) {
    const int64_t dout = fit_channels(cfg, std::min(din * 2, cmax));
    trunk.emplace_back(cfg, din, dout, /*pool=*/true, /*normed=*/false, rng);
    din = dout;
  }
  return {blocks, din};
}

}  // namespace

StyleEncoder::StyleEncoder(const TrainConfig& cfg, std::mt19937_64& rng)
    : style_dim(cfg.style_dim) {
  from_rgb = HConv(cfg, cfg.n, fit_channels(cfg, cfg.channels_base), 3, 1, 1, rng);
  TrunkDims dims = build_trunk(cfg, trunk, rng);
  final_conv = HConv(cfg, dims.last, dims.last, 2, 1, 0, rng);
  const int64_t sout = fit_channels(cfg, cfg.style_dim);
  for (int d = 0; d < cfg.num_domains; ++d) heads.emplace_back(cfg, dims.last, sout, rng);
}

Tensor StyleEncoder::forward(const Tensor& x, const Tensor& domains) const {
  Tensor h = from_rgb.forward(x);
  for (const auto& blk : trunk) h = blk.forward(h);
  h = leaky_relu(h, 0.2);
  h = final_conv.forward(h);
  h = leaky_relu(h, 0.2);
  h = reshape(h, {h.size(0), h.size(1)});
  Tensor out;
  for (size_t d = 0; d < heads.size(); ++d) {
    Tensor masked = mul(heads[d].forward(h), narrow(domains, 1, static_cast<int64_t>(d), 1));
    out = d == 0 ? masked : add(out, masked);
  }
  return fit_width(out, style_dim);
}

void StyleEncoder::params(const std::string& prefix, std::vector<Param>& out) {
  from_rgb.params(prefix + ".from_rgb", out);
  for (size_t i = 0; i < trunk.size(); ++i)
    trunk[i].params(prefix + ".blk" + std::to_string(i), out);
  final_conv.params(prefix + ".final_conv", out);
  for (size_t d = 0; d < heads.size(); ++d)
    heads[d].params(prefix + ".head" + std::to_string(d), out);
}

void StyleEncoder::state(const std::string& prefix, std::vector<Param>& out) {
  from_rgb.state(prefix + ".from_rgb", out);
  for (size_t i = 0; i < trunk.size(); ++i)
    trunk[i].state(prefix + ".blk" + std::to_string(i), out);
  final_conv.state(prefix + ".final_conv", out);
  for (size_t d = 0; d < heads.size(); ++d)
    heads[d].state(prefix + ".head" + std::to_string(d), out);
}

Discriminator::Discriminator(const TrainConfig& cfg, std::mt19937_64& rng) {
  from_rgb = HConv(cfg, cfg.n, fit_channels(cfg, cfg.channels_base), 3, 1, 1, rng);
  TrunkDims dims = build_trunk(cfg, trunk, rng);
  final_conv = HConv(cfg, dims.last, dims.last, 2, 1, 0, rng);
  for (int d = 0; d < cfg.num_domains; ++d) heads.emplace_back(dims.last, 1, rng);
}

Tensor Discriminator::forward(const Tensor& x, const Tensor& domains) const {
  Tensor h = from_rgb.forward(x);
  for (const auto& blk : trunk) h = blk.forward(h);
  h = leaky_relu(h, 0.2);
  h = final_conv.forward(h);
  h = leaky_relu(h, 0.2);
  h = reshape(h, {h.size(0), h.size(1)});
  Tensor out;
  for (size_t d = 0; d < heads.size(); ++d) {
    Tensor masked = mul(heads[d].forward(h), narrow(domains, 1, static_cast<int64_t>(d), 1));
    out = d == 0 ? masked : add(out, masked);
  }
  return out;
}

void Discriminator::params(const std::string& prefix, std::vector<Param>& out) {
  from_rgb.params(prefix + ".from_rgb", out);
  for (size_t i = 0; i < trunk.size(); ++i)
    trunk[i].params(prefix + ".blk" + std::to_string(i), out);
  final_conv.params(prefix + ".final_conv", out);
  for (size_t d = 0; d < heads.size(); ++d)
    heads[d].params(prefix + ".head" + std::to_string(d), out);
}

void Discriminator::state(const std::string& prefix, std::vector<Param>& out) {
  from_rgb.state(prefix + ".from_rgb", out);
  for (size_t i = 0; i < trunk.size(); ++i)
    trunk[i].state(prefix + ".blk" + std::to_string(i), out);
  final_conv.state(prefix + ".final_conv", out);
  for (size_t d = 0; d < heads.size(); ++d)
    heads[d].params(prefix + ".head" + std::to_string(d), out);
}

ModelBundle::ModelBundle(const TrainConfig& cfg_) : cfg(cfg_) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  g = Generator(cfg, rng);
  m = MappingNetwork(cfg, rng);
  s = StyleEncoder(cfg, rng);
  d = Discriminator(cfg, rng);
}

std::vector<Param> ModelBundle::g_params() {
  std::vector<Param> p;
  g.params("g", p);
  return p;
}

std::vector<Param> ModelBundle::m_params() {
  std::vector<Param> p;
  m.params("m", p);
  return p;
}

std::vector<Param> ModelBundle::s_params() {
  std::vector<Param> p;
  s.params("s", p);
  return p;
}

std::vector<Param> ModelBundle::d_params() {
  std::vector<Param> p;
  d.params("d", p);
  return p;
}

std::vector<Param> ModelBundle::all_params() {
  std::vector<Param> p;
  g.params("g", p);
  m.params("m", p);
  s.params("s", p);
  d.params("d", p);
  return p;
}

std::vector<Param> ModelBundle::all_state() {
  std::vector<Param> p;
  g.state("g", p);
  m.state("m", p);
  s.state("s", p);
  d.state("d", p);
  return p;
}

}  // namespace hyperstar
