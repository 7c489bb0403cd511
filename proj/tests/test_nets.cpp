#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "hyperstar/losses.hpp"
#include "hyperstar/nets.hpp"
#include "hyperstar/ops.hpp"

using namespace hyperstar;

namespace {

TrainConfig micro(int n) {
  TrainConfig cfg;
  cfg.n = n;
  cfg.image_size = 8;
  cfg.channels_base = 8;
  cfg.channels_max = 16;
  cfg.batch = 2;
  cfg.latent_dim = 4;
  cfg.style_dim = 8;
  cfg.total_iters = 10;
  cfg.seed = 5;
  return cfg;
}

Tensor rand_image(const TrainConfig& cfg, int64_t batch, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor x = Tensor::zeros({batch, cfg.n, cfg.image_size, cfg.image_size});
  for (int64_t i = 0; i < x.numel(); ++i) x.data()[i] = u(rng);
  return x;
}

Tensor rand_latent(const TrainConfig& cfg, int64_t batch, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Tensor z = Tensor::zeros({batch, cfg.latent_dim});
  for (int64_t i = 0; i < z.numel(); ++i) z.data()[i] = g(rng);
  return z;
}

int64_t trainable_of(std::vector<Param> ps) { return count_params(ps).trainable; }

}  // namespace

TEST_CASE("network forward shapes at desk scale", "[nets]") {
  TrainConfig cfg;  // desk defaults: n=4, 32x32
  ModelBundle mb(cfg);

  Tensor x = rand_image(cfg, 2, 1);
  Tensor z = rand_latent(cfg, 2, 2);
  Tensor oh = one_hot({0, 1}, cfg.num_domains);

  Tensor style = mb.m.forward(z, oh);
  REQUIRE(style.shape() == Shape{2, cfg.style_dim});

  Tensor y = mb.g.forward(x, style);
  REQUIRE(y.shape() == x.shape());
  for (int64_t i = 0; i < y.numel(); ++i) {
    REQUIRE(std::isfinite(y.data()[i]));
    REQUIRE(std::fabs(y.data()[i]) <= 1.0);  // tanh range
  }

  Tensor code = mb.s.forward(x, oh);
  REQUIRE(code.shape() == Shape{2, cfg.style_dim});

  Tensor logit = mb.d.forward(x, oh);
  REQUIRE(logit.shape() == Shape{2, 1});
  REQUIRE(std::isfinite(logit.data()[0]));
  REQUIRE(std::isfinite(logit.data()[1]));
}

TEST_CASE("branch counts follow num_domains", "[nets]") {
  TrainConfig cfg = micro(4);
  cfg.num_domains = 3;
  ModelBundle mb(cfg);
  REQUIRE(mb.m.branches.size() == 3);
  REQUIRE(mb.s.heads.size() == 3);
  REQUIRE(mb.d.heads.size() == 3);
}

TEST_CASE("styles and domains actually steer the networks", "[nets]") {
  TrainConfig cfg = micro(4);
  ModelBundle mb(cfg);
  Tensor x = rand_image(cfg, 2, 3);
  Tensor oh0 = one_hot({0, 0}, cfg.num_domains);
  Tensor oh1 = one_hot({1, 1}, cfg.num_domains);

  SECTION("two styles give two images") {
    Tensor s1 = mb.m.forward(rand_latent(cfg, 2, 4), oh0);
    Tensor s2 = mb.m.forward(rand_latent(cfg, 2, 5), oh0);
    const double d = l1_distance(mb.g.forward(x, s1), mb.g.forward(x, s2)).data()[0];
    REQUIRE(d > 0.0);
  }
  SECTION("same latent, different domain branch") {
    Tensor z = rand_latent(cfg, 2, 6);
    const double d = l1_distance(mb.m.forward(z, oh0), mb.m.forward(z, oh1)).data()[0];
    REQUIRE(d > 0.0);
  }
  SECTION("encoder output depends on the queried domain") {
    const double d = l1_distance(mb.s.forward(x, oh0), mb.s.forward(x, oh1)).data()[0];
    REQUIRE(d > 0.0);
  }
  SECTION("discriminator branches disagree") {
    const double d = l1_distance(mb.d.forward(x, oh0), mb.d.forward(x, oh1)).data()[0];
    REQUIRE(d > 0.0);
  }
}

TEST_CASE("full-scale generator lands near its reference size", "[nets][counts]") {
  TrainConfig cfg = TrainConfig::full_preset(1);
  std::mt19937_64 rng(0);
  Generator g(cfg, rng);
  std::vector<Param> ps;
  g.params("g", ps);
  const double count = static_cast<double>(trainable_of(ps));
  REQUIRE(count / 43.5e6 > 0.90);
  REQUIRE(count / 43.5e6 < 1.10);
}

TEST_CASE("hypercomplex widths cut the full-scale model by the expected margins",
          "[nets][counts]") {
  auto total = [](int n) {
    ModelBundle mb(TrainConfig::full_preset(n));
    return static_cast<double>(trainable_of(mb.all_params()));
  };
  const double c1 = total(1);
  const double c3 = total(3);
  const double c4 = total(4);
  const double sav4 = 1.0 - c4 / c1;
  const double sav3 = 1.0 - c3 / c1;
  INFO("savings n=4: " << sav4 << ", n=3: " << sav3);
  REQUIRE(sav4 >= 0.72);
  REQUIRE(sav4 <= 0.78);
  REQUIRE(sav3 >= 0.64);
  REQUIRE(sav3 <= 0.70);
}

TEST_CASE("frozen-algebra build shares every weight shape with the trained-algebra build",
          "[nets][counts]") {
  TrainConfig plain = micro(4);
  TrainConfig quat = micro(4);
  quat.a_scheme = AScheme::quat_pattern;
  quat.freeze_a = true;

  ModelBundle mp(plain), mq(quat);
  auto pp = mp.all_params();
  auto pq = mq.all_params();

  // The frozen build's trainable set is the plain set minus the algebra tensors.
  std::vector<std::pair<std::string, Shape>> plain_no_a, quat_all;
  for (const auto& p : pp)
    if (p.name.size() < 2 || p.name.substr(p.name.size() - 2) != ".a")
      plain_no_a.emplace_back(p.name, p.value.shape());
  for (const auto& p : pq) quat_all.emplace_back(p.name, p.value.shape());
  REQUIRE(plain_no_a == quat_all);
  REQUIRE(trainable_of(pq) < trainable_of(pp));

  // Saved state still carries the pattern tensors: identical layout.
  auto sp = mp.all_state();
  auto sq = mq.all_state();
  REQUIRE(sp.size() == sq.size());
  for (size_t i = 0; i < sp.size(); ++i) {
    REQUIRE(sp[i].name == sq[i].name);
    REQUIRE(sp[i].value.shape() == sq[i].value.shape());
  }
}

TEST_CASE("full generator objective passes finite differences on sampled weights",
          "[nets][grad]") {
  TrainConfig cfg = micro(4);
  cfg.batch = 1;
  ModelBundle mb(cfg);

  Tensor x = rand_image(cfg, 1, 7);
  Tensor z = rand_latent(cfg, 1, 8);
  Tensor oh_src = one_hot({0}, cfg.num_domains);
  Tensor oh_trg = one_hot({1}, cfg.num_domains);

  // Second generation is held fixed, exactly as in training.
  Tensor fake2;
  {
    NoGrad ng;
    fake2 = mb.g.forward(x, mb.m.forward(rand_latent(cfg, 1, 9), oh_trg));
  }

  auto objective = [&] {
    Tensor s1 = mb.m.forward(z, oh_trg);
    Tensor fake1 = mb.g.forward(x, s1);
    Tensor adv = adversarial_loss_g(mb.d.forward(fake1, oh_trg));
    Tensor sty = style_reconstruction_loss(s1, mb.s.forward(fake1, oh_trg));
    Tensor ds = diversification_loss(image_content(fake1, cfg.n), image_content(fake2, cfg.n));
    Tensor rec = mb.g.forward(fake1, mb.s.forward(x, oh_src));
    Tensor cyc = cycle_loss(image_content(x, cfg.n), image_content(rec, cfg.n));
    return add(sub(add(adv, sty), scalar_mul(ds, 0.5)), cyc);
  };

  // One representative tensor from each part of the model.
  auto params = mb.all_params();
  std::vector<std::string> picks = {
      "g.from_rgb.f", "g.encode0.conv1.f", "g.decode2.ada1.proj.f", "g.to_rgb.b",
      "m.shared0.f",  "m.branch1.3.f",     "s.head1.f",             "d.head1.w"};
  int found = 0;
  for (auto& p : params) {
    bool want = false;
    for (const auto& pick : picks) want = want || p.name == pick;
    if (!want) continue;
    ++found;
    // Small step: the objective is piecewise smooth (L1 terms, leaky slopes),
    // and a wide probe can straddle a corner.
    double e = grad_check([&](const Tensor&) { return objective(); }, p.value, 1e-7);
    INFO(p.name);
    CHECK(e < 1e-3);
  }
  REQUIRE(found == static_cast<int>(picks.size()));
}

TEST_CASE("configuration guidance", "[nets]") {
  SECTION("n=5 is rejected with divisibility guidance") {
    TrainConfig cfg = micro(4);
    cfg.n = 5;
    REQUIRE_THROWS_WITH(cfg.validate(),
                        Catch::Contains("divisible") && Catch::Contains("n=5"));
  }
  SECTION("non-power-of-two sizes are rejected") {
    TrainConfig cfg = micro(4);
    cfg.image_size = 12;
    REQUIRE_THROWS_WITH(cfg.validate(), Catch::Contains("power of two"));
  }
  SECTION("a generator too deep for its input reports spatial underflow") {
    TrainConfig cfg = micro(4);
    cfg.image_size = 4;  // bypasses validate(): direct construction
    std::mt19937_64 rng(0);
    REQUIRE_THROWS_WITH(Generator(cfg, rng), Catch::Contains("spatial underflow"));
  }
  SECTION("freezing the algebra needs the quaternion pattern") {
    TrainConfig cfg = micro(4);
    cfg.freeze_a = true;  // scheme left at rand_integer
    REQUIRE_THROWS(cfg.validate());
  }
  SECTION("labels out of range") {
    REQUIRE_THROWS(one_hot({0, 2}, 2));
  }
}
