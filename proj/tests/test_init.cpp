#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "hyperstar/algebra.hpp"
#include "hyperstar/init.hpp"
#include "hyperstar/ops.hpp"

using namespace hyperstar;

namespace {

double entries_variance(const std::vector<double>& v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0;
  for (double x : v) var += (x - mean) * (x - mean);
  return var / static_cast<double>(v.size());
}

double excess_kurtosis(const Tensor& t) {
  double mean = 0;
  for (int64_t i = 0; i < t.numel(); ++i) mean += t.data()[i];
  mean /= static_cast<double>(t.numel());
  double m2 = 0, m4 = 0;
  for (int64_t i = 0; i < t.numel(); ++i) {
    const double d = t.data()[i] - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(t.numel());
  m4 /= static_cast<double>(t.numel());
  return m4 / (m2 * m2) - 3.0;
}

// 256x256 synthesized weight matrix under a given algebra scheme, n=4.
Tensor synth_weight(AScheme scheme, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor a = Tensor::zeros({4, 4, 4});
  init_A(a, 4, scheme, rng);
  Tensor f = Tensor::zeros({4, 64, 64});
  fill_xavier_normal(f, 256, 256, rng);
  return ph_compose_matrix(a, f);
}

}  // namespace

TEST_CASE("gaussian algebra init has variance 1/n", "[init]") {
  std::mt19937_64 rng(1);
  std::vector<double> samples;
  Tensor a = Tensor::zeros({4, 4, 4});
  while (samples.size() < 100000) {
    init_xavier_A(a, 4, rng);
    samples.insert(samples.end(), a.data(), a.data() + a.numel());
  }
  CHECK(entries_variance(samples) == Approx(0.25).epsilon(0.05));

  samples.clear();
  Tensor a2 = Tensor::zeros({2, 2, 2});
  while (samples.size() < 100000) {
    init_xavier_A(a2, 2, rng);
    samples.insert(samples.end(), a2.data(), a2.data() + a2.numel());
  }
  CHECK(entries_variance(samples) == Approx(0.5).epsilon(0.05));
}

TEST_CASE("algebra initializations are deterministic under a fixed seed", "[init]") {
  for (AScheme s : {AScheme::xavier, AScheme::rand_integer}) {
    std::mt19937_64 r1(99), r2(99);
    Tensor a1 = Tensor::zeros({4, 4, 4}), a2 = Tensor::zeros({4, 4, 4});
    init_A(a1, 4, s, r1);
    init_A(a2, 4, s, r2);
    for (int64_t i = 0; i < 64; ++i) CHECK(a1.data()[i] == a2.data()[i]);
  }
}

TEST_CASE("hamilton pattern init places exactly the sign table", "[init]") {
  Tensor a = Tensor::zeros({4, 4, 4});
  init_quat_pattern_A(a, 4);
  int plus = 0, minus = 0;
  for (int i = 0; i < 4; ++i) {
    int nonzero = 0;
    for (int j = 0; j < 16; ++j) {
      const double v = a.data()[i * 16 + j];
      CHECK((v == 0.0 || v == 1.0 || v == -1.0));
      if (v != 0.0) ++nonzero;
      if (v == 1.0) ++plus;
      if (v == -1.0) ++minus;
    }
    CHECK(nonzero == 4);
  }
  CHECK(plus == 10);
  CHECK(minus == 6);

  std::mt19937_64 rng(7);
  CHECK_THROWS_AS(init_quat_pattern_A(a, 3), value_error);

  // Synthesis with this pattern reproduces the block matrix bitwise.
  Tensor f = Tensor::zeros({4, 8, 8});
  fill_xavier_normal(f, 32, 32, rng);
  Tensor h = ph_compose_matrix(a, f);
  Tensor w0 = Tensor::zeros({8, 8}), w1 = Tensor::zeros({8, 8});
  Tensor w2 = Tensor::zeros({8, 8}), w3 = Tensor::zeros({8, 8});
  std::copy_n(f.data() + 0 * 64, 64, w0.data());
  std::copy_n(f.data() + 1 * 64, 64, w1.data());
  std::copy_n(f.data() + 2 * 64, 64, w2.data());
  std::copy_n(f.data() + 3 * 64, 64, w3.data());
  Tensor ref = hamilton_matrix(w0, w1, w2, w3);
  for (int64_t i = 0; i < h.numel(); ++i) CHECK(h.data()[i] == ref.data()[i]);
}

TEST_CASE("integer algebra init draws uniformly from {-1,0,1}", "[init]") {
  std::mt19937_64 rng(5);
  int64_t counts[3] = {0, 0, 0};
  Tensor a = Tensor::zeros({4, 4, 4});
  int64_t total = 0;
  while (total < 100000) {
    init_rand_integer_A(a, 4, rng);
    for (int64_t i = 0; i < 64; ++i) {
      const double v = a.data()[i];
      REQUIRE((v == -1.0 || v == 0.0 || v == 1.0));
      ++counts[static_cast<int>(v) + 1];
    }
    total += 64;
  }
  for (int k = 0; k < 3; ++k)
    CHECK(static_cast<double>(counts[k]) / static_cast<double>(total) ==
          Approx(1.0 / 3.0).margin(0.02 / 3.0));
}

TEST_CASE("synthesized weight variance stays near the real-layer scale", "[init]") {
  // A real 256x256 layer has variance 2/512; integer and gaussian algebra
  // inits must keep the synthesized matrix within a 3x band of that.
  const double real_var = 2.0 / 512.0;
  for (AScheme s : {AScheme::xavier, AScheme::rand_integer}) {
    double var_sum = 0;
    for (uint64_t seed = 0; seed < 5; ++seed) {
      Tensor h = synth_weight(s, 1000 + seed);
      std::vector<double> v(h.data(), h.data() + h.numel());
      var_sum += entries_variance(v);
    }
    const double ratio = (var_sum / 5.0) / real_var;
    INFO("scheme " << to_string(s) << " ratio " << ratio);
    CHECK(ratio < 3.0);
    CHECK(ratio > 1.0 / 3.0);
  }
}

TEST_CASE("gaussian algebra yields heavier-tailed weights than integer algebra", "[init]") {
  int wins = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const double kx = excess_kurtosis(synth_weight(AScheme::xavier, 2000 + seed));
    const double ki = excess_kurtosis(synth_weight(AScheme::rand_integer, 2000 + seed));
    if (kx > ki) ++wins;
  }
  CHECK(wins >= 19);
}

TEST_CASE("density report normalizes and flags degenerate inputs", "[init]") {
  Tensor zeroes = Tensor::zeros({100});
  DensityReport spike = weight_density_report({{"zero", {&zeroes}}}, 8);
  int nonzero_bins = 0;
  double sum = 0;
  for (const auto& r : spike.rows) {
    sum += r.density;
    if (r.density > 0) ++nonzero_bins;
  }
  CHECK(nonzero_bins == 1);
  CHECK(sum == Approx(1.0).margin(1e-9));

  std::mt19937_64 rng(3);
  Tensor real = Tensor::zeros({256, 256});
  fill_xavier_normal(real, 256, 256, rng);
  Tensor hx = synth_weight(AScheme::xavier, 42);
  Tensor hq = [&] {
    Tensor a = Tensor::zeros({4, 4, 4});
    init_quat_pattern_A(a, 4);
    Tensor f = Tensor::zeros({4, 64, 64});
    fill_xavier_normal(f, 256, 256, rng);
    return ph_compose_matrix(a, f);
  }();
  Tensor hr = synth_weight(AScheme::rand_integer, 43);
  DensityReport rep = weight_density_report(
      {{"real_xavier", {&real}}, {"xavier", {&hx}}, {"quat_pattern", {&hq}},
       {"rand_integer", {&hr}}},
      64);
  REQUIRE(rep.stats.size() == 4);
  REQUIRE(rep.rows.size() == 4 * 64);
  for (const auto& label : {"real_xavier", "xavier", "quat_pattern", "rand_integer"}) {
    double s = 0;
    for (const auto& r : rep.rows)
      if (r.scheme == label) s += r.density;
    CHECK(s == Approx(1.0).margin(1e-9));
  }
  // the gaussian-algebra scheme peaks hardest at zero
  auto stat = [&](const std::string& name) {
    for (const auto& s : rep.stats)
      if (s.scheme == name) return s.excess_kurtosis;
    FAIL("missing scheme");
    return 0.0;
  };
  CHECK(stat("xavier") > stat("rand_integer"));
  CHECK(stat("xavier") > stat("real_xavier"));

  const std::string csv = density_report_csv(rep);
  CHECK(csv.rfind("scheme,bin_left,bin_right,density\n", 0) == 0);

  CHECK_THROWS_AS(weight_density_report({}, 8), value_error);
  CHECK_THROWS_AS(weight_density_report({{"x", {&real}}}, 1), value_error);
}

TEST_CASE("f32 snapping is idempotent and exact on representable values", "[init]") {
  CHECK(snap_f32(1.0) == 1.0);
  CHECK(snap_f32(0.1) != 0.1);  // 0.1 is not an f32 grid point
  const double snapped = snap_f32(0.1);
  CHECK(snap_f32(snapped) == snapped);
  std::mt19937_64 rng(11);
  Tensor t = Tensor::zeros({100});
  fill_xavier_normal(t, 10, 10, rng);
  snap_f32(t);
  for (int64_t i = 0; i < t.numel(); ++i)
    CHECK(static_cast<double>(static_cast<float>(t.data()[i])) == t.data()[i]);
}
