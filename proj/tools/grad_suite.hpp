#pragma once

// Finite-difference verification suites shared by the command-line tool and
// the acceptance runner.

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hyperstar/dataset.hpp"
#include "hyperstar/losses.hpp"
#include "hyperstar/nets.hpp"
#include "hyperstar/norm.hpp"
#include "hyperstar/ops.hpp"

namespace hyperstar {
namespace gradsuite {

struct CheckResult {
  std::string name;
  double max_rel = 0;
};

// Max FD error of the objective over each tensor in wrt.
inline double fd_over(const std::function<Tensor()>& objective,
                      const std::vector<Tensor*>& wrt, double h) {
  double worst = 0;
  for (Tensor* t : wrt) {
    Graph::get().clear();
    worst = std::max(worst, grad_check([&](const Tensor&) { return objective(); }, *t, h));
  }
  Graph::get().clear();
  return worst;
}

inline Tensor rand_tensor(Shape s, std::mt19937_64& rng, bool grad = false) {
  Tensor t = Tensor::zeros(std::move(s), grad);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = nd(rng);
  return t;
}

// Fixed random projection makes the scalar sensitive to every output entry.
inline std::function<Tensor()> project(const std::function<Tensor()>& fwd,
                                       std::mt19937_64& rng) {
  Tensor y0;
  {
    NoGrad ng;
    y0 = fwd();
  }
  Tensor probe = rand_tensor(y0.shape(), rng);
  return [fwd, probe]() { return sum_all(mul(fwd(), probe)); };
}

inline std::vector<CheckResult> layer_suite() {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(17);
  const double h = 1e-5;

  {
    DenseLayer fc(6, 5, rng);
    Tensor x = rand_tensor({3, 6}, rng, true);
    auto obj = project([&] { return fc.forward(x); }, rng);
    out.push_back({"dense", fd_over(obj, {&x, &fc.w, &fc.b}, h)});
  }
  {
    Conv2dLayer conv(3, 5, 3, 1, 1, rng);
    Tensor x = rand_tensor({2, 3, 6, 6}, rng, true);
    auto obj = project([&] { return conv.forward(x); }, rng);
    out.push_back({"conv2d", fd_over(obj, {&x, &conv.k, &conv.b}, h)});
  }
  {
    Conv2dLayer conv(3, 4, 4, 2, 1, rng);
    Tensor x = rand_tensor({2, 3, 8, 8}, rng, true);
    auto obj = project([&] { return conv.forward(x); }, rng);
    out.push_back({"conv2d_strided", fd_over(obj, {&x, &conv.k, &conv.b}, h)});
  }
  {
    PHMLayer fc(4, 8, 8, AScheme::rand_integer, rng);
    Tensor x = rand_tensor({3, 8}, rng, true);
    auto obj = project([&] { return fc.forward(x); }, rng);
    out.push_back({"ph_dense", fd_over(obj, {&x, &fc.a, &fc.f, &fc.b}, h)});
  }
  {
    PHCLayer conv(4, 8, 8, 3, 1, 1, AScheme::rand_integer, rng);
    Tensor x = rand_tensor({2, 8, 5, 5}, rng, true);
    auto obj = project([&] { return conv.forward(x); }, rng);
    out.push_back({"ph_conv", fd_over(obj, {&x, &conv.a, &conv.f, &conv.b}, h)});
  }
  {
    QuaternionConvLayer conv(8, 8, 3, 1, 1, rng);
    Tensor x = rand_tensor({2, 8, 5, 5}, rng, true);
    auto obj = project([&] { return conv.forward(x); }, rng);
    out.push_back({"quaternion_conv", fd_over(obj, {&x, &conv.f, &conv.b}, h)});
  }
  {
    HINLayer norm(1, 6);
    Tensor x = rand_tensor({2, 6, 4, 4}, rng, true);
    auto obj = project([&] { return norm.forward(x); }, rng);
    out.push_back({"instance_norm", fd_over(obj, {&x, &norm.gamma, &norm.beta}, h)});
  }
  {
    HINLayer norm(4, 8);
    Tensor x = rand_tensor({2, 8, 4, 4}, rng, true);
    auto obj = project([&] { return norm.forward(x); }, rng);
    out.push_back({"hyper_instance_norm", fd_over(obj, {&x, &norm.gamma, &norm.beta}, h)});
  }
  {
    HAdaINLayer norm(4, 4, 8, 8, AScheme::rand_integer, rng);
    Tensor x = rand_tensor({2, 8, 4, 4}, rng, true);
    Tensor s = rand_tensor({2, 8}, rng, true);
    auto obj = project([&] { return norm.forward(x, s); }, rng);
    out.push_back(
        {"hyper_adain", fd_over(obj, {&x, &s, &norm.proj.a, &norm.proj.f, &norm.proj.b}, h)});
  }
  {
    Tensor x = rand_tensor({40}, rng, true);
    auto obj = project([&] { return leaky_relu(x); }, rng);
    out.push_back({"leaky_relu", fd_over(obj, {&x}, h)});
  }
  {
    Tensor x = rand_tensor({40}, rng, true);
    auto obj = project([&] { return tanh_op(x); }, rng);
    out.push_back({"tanh", fd_over(obj, {&x}, h)});
  }
  {
    Tensor x = rand_tensor({2, 3, 6, 6}, rng, true);
    auto obj = project([&] { return avg_pool2d(x); }, rng);
    out.push_back({"avg_pool", fd_over(obj, {&x}, h)});
  }
  {
    Tensor x = rand_tensor({2, 3, 4, 4}, rng, true);
    auto obj = project([&] { return upsample_nearest2(x); }, rng);
    out.push_back({"upsample", fd_over(obj, {&x}, h)});
  }
  {
    Tensor real = rand_tensor({5}, rng, true);
    Tensor fake = rand_tensor({5}, rng, true);
    auto obj = [&] { return adversarial_loss_d(real, fake); };
    out.push_back({"adversarial_d", fd_over(obj, {&real, &fake}, h)});
    auto objg = [&] { return adversarial_loss_g(fake); };
    out.push_back({"adversarial_g", fd_over(objg, {&fake}, h)});
  }
  {
    Tensor a = rand_tensor({3, 8}, rng, true);
    Tensor b = rand_tensor({3, 8}, rng, true);
    auto obj = [&] { return style_reconstruction_loss(a, b); };
    out.push_back({"style_reconstruction", fd_over(obj, {&a, &b}, h)});
  }
  {
    Tensor a = rand_tensor({2, 3, 4, 4}, rng, true);
    Tensor b = rand_tensor({2, 3, 4, 4}, rng, true);
    auto obj = [&] { return diversification_loss(a, b); };
    out.push_back({"diversification", fd_over(obj, {&a, &b}, h)});
    auto objc = [&] { return cycle_loss(a, b); };
    out.push_back({"cycle", fd_over(objc, {&a, &b}, h)});
  }
  return out;
}

inline std::vector<CheckResult> network_suite() {
  TrainConfig cfg;
  cfg.n = 4;
  cfg.image_size = 8;
  cfg.channels_base = 8;
  cfg.channels_max = 16;
  cfg.num_domains = 2;
  cfg.latent_dim = 4;
  cfg.style_dim = 8;
  cfg.batch = 2;
  cfg.seed = 23;
  ModelBundle bundle(cfg);

  Dataset data = generate_synthetic_dataset(cfg.num_domains, cfg.image_size, 4, 23);
  Tensor x = to_model_channels(stack_images(data, {0, 1}), cfg.n);
  std::mt19937_64 rng(29);
  Tensor z = rand_tensor({2, cfg.latent_dim}, rng);
  Tensor z2 = rand_tensor({2, cfg.latent_dim}, rng);
  Tensor oh_src = one_hot({0, 1}, cfg.num_domains);
  Tensor oh_trg = one_hot({1, 0}, cfg.num_domains);

  Tensor fake2;
  {
    NoGrad ng;
    fake2 = bundle.g.forward(x, bundle.m.forward(z2, oh_trg));
  }
  // mirrors one generator-side update: adversarial push, style match,
  // diversification (fixed second sample), cycle back to the source
  auto objective = [&]() {
    Tensor s1 = bundle.m.forward(z, oh_trg);
    Tensor fake1 = bundle.g.forward(x, s1);
    Tensor adv = adversarial_loss_g(bundle.d.forward(fake1, oh_trg));
    Tensor sty = style_reconstruction_loss(s1, bundle.s.forward(fake1, oh_trg));
    Tensor ds =
        diversification_loss(image_content(fake1, cfg.n), image_content(fake2, cfg.n));
    Tensor rec = bundle.g.forward(fake1, bundle.s.forward(x, oh_src));
    Tensor cyc = cycle_loss(image_content(x, cfg.n), image_content(rec, cfg.n));
    return add(add(adv, sty), add(scalar_mul(ds, -0.5), cyc));
  };

  const std::vector<std::string> picks = {
      "g.from_rgb.f", "g.encode0.conv1.f", "g.decode2.ada1.proj.f", "g.to_rgb.b",
      "m.shared0.f",  "m.branch1.3.f",     "s.head1.f",             "d.head1.w"};
  std::vector<CheckResult> out;
  for (auto& p : bundle.all_params()) {
    if (std::find(picks.begin(), picks.end(), p.name) == picks.end()) continue;
    // narrow step: the objective is piecewise smooth and a wide probe can
    // straddle a corner
    Graph::get().clear();
    double rel = grad_check([&](const Tensor&) { return objective(); }, p.value, 1e-7);
    out.push_back({"network " + p.name, rel});
  }
  Graph::get().clear();
  return out;
}

}  // namespace gradsuite
}  // namespace hyperstar
