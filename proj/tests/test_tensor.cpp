#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "hyperstar/ops.hpp"
#include "hyperstar/tensor.hpp"

using namespace hyperstar;

namespace {

Tensor rand_tensor(Shape s, std::mt19937_64& rng, bool rg = false, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> d(lo, hi);
  Tensor t = Tensor::zeros(std::move(s), rg);
  for (int64_t i = 0; i < t.numel(); ++i) t.data()[i] = d(rng);
  return t;
}

// FD checks sit on kinked functions (relu family, abs); keep samples away from
// the kink so central differences stay valid.
void nudge_from_zero(Tensor& t, double margin = 1e-3) {
  for (int64_t i = 0; i < t.numel(); ++i) {
    double& v = t.data()[i];
    if (std::abs(v) < margin) v = v < 0 ? v - margin : v + margin;
  }
}

// Reference conv as the plain definition: six nested loops, zero padding.
Tensor conv2d_naive(const Tensor& x, const Tensor& k, int stride, int pad) {
  const int64_t N = x.size(0), C = x.size(1), H = x.size(2), W = x.size(3);
  const int64_t O = k.size(0), kh = k.size(2), kw = k.size(3);
  const int64_t Ho = (H + 2 * pad - kh) / stride + 1;
  const int64_t Wo = (W + 2 * pad - kw) / stride + 1;
  Tensor y = Tensor::zeros({N, O, Ho, Wo});
  for (int64_t n = 0; n < N; ++n)
    for (int64_t o = 0; o < O; ++o)
      for (int64_t oy = 0; oy < Ho; ++oy)
        for (int64_t ox = 0; ox < Wo; ++ox) {
          double acc = 0;
          for (int64_t c = 0; c < C; ++c)
            for (int64_t ky = 0; ky < kh; ++ky)
              for (int64_t kx = 0; kx < kw; ++kx) {
                const int64_t iy = oy * stride - pad + ky;
                const int64_t ix = ox * stride - pad + kx;
                if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                acc += x.data()[((n * C + c) * H + iy) * W + ix] *
                       k.data()[((o * C + c) * kh + ky) * kw + kx];
              }
          y.data()[((n * O + o) * Ho + oy) * Wo + ox] = acc;
        }
  return y;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  REQUIRE(a.shape() == b.shape());
  double m = 0;
  for (int64_t i = 0; i < a.numel(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace

TEST_CASE("matmul identity and hand-checked product", "[tensor]") {
  Tensor I2 = Tensor::from({2, 2}, {1, 0, 0, 1});
  Tensor v = Tensor::from({2, 1}, {3, 4});
  Tensor r = matmul(I2, v);
  CHECK(r.data()[0] == 3.0);
  CHECK(r.data()[1] == 4.0);

  Tensor a = Tensor::from({2, 2}, {1, 2, 3, 4});
  Tensor b = Tensor::from({2, 2}, {5, 6, 7, 8});
  Tensor c = matmul(a, b);
  CHECK(c.data()[0] == 19.0);
  CHECK(c.data()[1] == 22.0);
  CHECK(c.data()[2] == 43.0);
  CHECK(c.data()[3] == 50.0);
}

TEST_CASE("matmul agrees with triple-loop reference on random shapes", "[tensor]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_int_distribution<int64_t> dim(1, 9);
    const int64_t m = dim(rng), k = dim(rng), p = dim(rng);
    Tensor a = rand_tensor({m, k}, rng), b = rand_tensor({k, p}, rng);
    Tensor c = matmul(a, b);
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < p; ++j) {
        double acc = 0;
        for (int64_t t = 0; t < k; ++t) acc += a.data()[i * k + t] * b.data()[t * p + j];
        CHECK(c.data()[i * p + j] == Approx(acc).margin(1e-12));
      }
  }
}

TEST_CASE("matmul dimension mismatch names both shapes", "[tensor]") {
  Tensor a = Tensor::zeros({2, 3});
  Tensor b = Tensor::zeros({4, 2});
  CHECK_THROWS_WITH(matmul(a, b),
                    Catch::Contains("[2,3]") && Catch::Contains("[4,2]"));
}

TEST_CASE("conv2d identity and constant kernels", "[tensor]") {
  std::mt19937_64 rng(3);
  Tensor x = rand_tensor({1, 1, 4, 4}, rng);
  Tensor k1 = Tensor::from({1, 1, 1, 1}, {1.0});
  CHECK(max_abs_diff(conv2d(x, k1, 1, 0), x) == 0.0);

  Tensor xc = Tensor::full({1, 1, 5, 5}, 2.5);
  Tensor k9 = Tensor::full({1, 1, 3, 3}, 1.0);
  Tensor y = conv2d(xc, k9, 1, 0);
  for (int64_t i = 0; i < y.numel(); ++i) CHECK(y.data()[i] == Approx(9 * 2.5).epsilon(1e-13));
}

TEST_CASE("conv2d matches the nested-loop reference on all stride/pad combos", "[tensor]") {
  std::mt19937_64 rng(11);
  for (int stride : {1, 2})
    for (int pad : {0, 1})
      for (int trial = 0; trial < 3; ++trial) {
        Tensor x = rand_tensor({2, 3, 8, 7}, rng);
        Tensor k = rand_tensor({4, 3, 3, 3}, rng);
        CHECK(max_abs_diff(conv2d(x, k, stride, pad), conv2d_naive(x, k, stride, pad)) < 1e-12);
      }
  // 1x1 and wide kernels as edge cases
  Tensor x = rand_tensor({1, 1, 4, 4}, rng);
  Tensor k = rand_tensor({1, 1, 3, 3}, rng);
  CHECK(max_abs_diff(conv2d(x, k, 1, 1), conv2d_naive(x, k, 1, 1)) < 1e-12);
}

TEST_CASE("conv2d rejects channel mismatch and empty outputs", "[tensor]") {
  Tensor x = Tensor::zeros({1, 2, 4, 4});
  Tensor k = Tensor::zeros({1, 3, 3, 3});
  CHECK_THROWS_AS(conv2d(x, k, 1, 1), shape_error);
  Tensor k2 = Tensor::zeros({1, 2, 7, 7});
  CHECK_THROWS_AS(conv2d(x, k2, 1, 0), shape_error);
}

TEST_CASE("primitive point values", "[tensor]") {
  Tensor m1 = Tensor::from({1}, {-1.0});
  CHECK(leaky_relu(m1, 0.2).data()[0] == Approx(-0.2));
  CHECK(relu(m1).data()[0] == 0.0);

  std::mt19937_64 rng(5);
  Tensor x = rand_tensor({3, 4}, rng);
  CHECK(l1_distance(x, x).item() == 0.0);

  Tensor logit = Tensor::from({1}, {0.0});
  Tensor one = Tensor::from({1}, {1.0});
  CHECK(bce_with_logits(logit, one).item() == Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("backward through sum of squares", "[tensor]") {
  Tensor x = Tensor::from({3}, {1, 2, 3}, true);
  Tensor loss = sum_all(mul(x, x));
  loss.backward();
  CHECK(x.grad().data()[0] == Approx(2.0));
  CHECK(x.grad().data()[1] == Approx(4.0));
  CHECK(x.grad().data()[2] == Approx(6.0));
  Graph::get().clear();
}

TEST_CASE("two backward calls double accumulated gradients", "[tensor]") {
  Tensor x = Tensor::from({2}, {1.5, -0.5}, true);
  Tensor loss = sum_all(mul(x, x));
  loss.backward();
  Tensor g1 = x.grad();
  loss.backward();
  Tensor g2 = x.grad();
  for (int64_t i = 0; i < 2; ++i) CHECK(g2.data()[i] == Approx(2 * g1.data()[i]));
  Graph::get().clear();
}

TEST_CASE("backward rejects non-scalar and detached tensors", "[tensor]") {
  Tensor x = Tensor::from({2}, {1, 2}, true);
  Tensor y = mul(x, x);
  CHECK_THROWS_AS(y.backward(), shape_error);
  Tensor z = Tensor::from({1}, {3.0});
  CHECK_THROWS_AS(z.backward(), value_error);
  Graph::get().clear();
}

TEST_CASE("shared subexpressions accumulate by the sum rule", "[tensor]") {
  Tensor x = Tensor::from({2}, {2.0, 3.0}, true);
  // f(x) + g(x) where f = sum(x*x), g = 3*sum(x)
  Tensor loss = add(sum_all(mul(x, x)), scalar_mul(sum_all(x), 3.0));
  loss.backward();
  CHECK(x.grad().data()[0] == Approx(2 * 2.0 + 3.0));
  CHECK(x.grad().data()[1] == Approx(2 * 3.0 + 3.0));
  Graph::get().clear();
}

TEST_CASE("broadcasting matches explicit expansion", "[tensor]") {
  // [2,3,2] * [3,1] -> [2,3,2]
  Tensor a = Tensor::from({2, 3, 2}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  Tensor b = Tensor::from({3, 1}, {10, 20, 30});
  Tensor c = mul(a, b);
  REQUIRE(c.shape() == Shape{2, 3, 2});
  const double expect[] = {10,  20,  60,  80,  150, 180, 70, 80, 180, 200, 330, 360};
  for (int64_t i = 0; i < 12; ++i) CHECK(c.data()[i] == Approx(expect[i]));

  Tensor s = Tensor::from({1}, {2.0});
  Tensor d = add(a, s);
  for (int64_t i = 0; i < 12; ++i) CHECK(d.data()[i] == Approx(a.data()[i] + 2.0));
}

TEST_CASE("broadcast gradients reduce over the stretched axes", "[tensor]") {
  Tensor a = Tensor::from({2, 2}, {1, 2, 3, 4}, true);
  Tensor b = Tensor::from({2}, {10, 20}, true);
  Tensor loss = sum_all(mul(a, b));
  loss.backward();
  // d/da = broadcast(b), d/db = column sums of a
  CHECK(a.grad().data()[0] == Approx(10));
  CHECK(a.grad().data()[1] == Approx(20));
  CHECK(a.grad().data()[2] == Approx(10));
  CHECK(a.grad().data()[3] == Approx(20));
  CHECK(b.grad().data()[0] == Approx(1 + 3));
  CHECK(b.grad().data()[1] == Approx(2 + 4));
  Graph::get().clear();
}

TEST_CASE("reductions over axes", "[tensor]") {
  Tensor a = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor s = sum_axes(a, {1});
  REQUIRE(s.shape() == Shape{2, 1});
  CHECK(s.data()[0] == 6.0);
  CHECK(s.data()[1] == 15.0);
  Tensor m = mean_axes(a, {0});
  REQUIRE(m.shape() == Shape{1, 3});
  CHECK(m.data()[0] == Approx(2.5));
  CHECK(m.data()[2] == Approx(4.5));
  Tensor all = mean_axes(a, {0, 1});
  CHECK(all.data()[0] == Approx(3.5));
}

TEST_CASE("narrow, pad and reshape round-trip with gradients", "[tensor]") {
  Tensor x = Tensor::from({2, 4}, {1, 2, 3, 4, 5, 6, 7, 8}, true);
  Tensor mid = narrow(x, 1, 1, 2);
  REQUIRE(mid.shape() == Shape{2, 2});
  CHECK(mid.data()[0] == 2.0);
  CHECK(mid.data()[3] == 7.0);
  Tensor padded = pad_dim_end(mid, 1, 3);
  REQUIRE(padded.shape() == Shape{2, 5});
  CHECK(padded.data()[2] == 0.0);
  Tensor flat = reshape(padded, {10});
  Tensor loss = sum_all(mul(flat, flat));
  loss.backward();
  CHECK(x.grad().data()[0] == 0.0);   // outside the narrow
  CHECK(x.grad().data()[1] == Approx(2 * 2.0));
  CHECK(x.grad().data()[2] == Approx(2 * 3.0));
  CHECK(x.grad().data()[3] == 0.0);
  Graph::get().clear();
}

TEST_CASE("every primitive passes central-difference checks on random input", "[tensor][grad]") {
  std::mt19937_64 rng(2024);
  for (int seed_trial = 0; seed_trial < 20; ++seed_trial) {
    Tensor x = rand_tensor({2, 6}, rng, true);
    nudge_from_zero(x);
    auto check = [&](const std::function<Tensor(const Tensor&)>& f) {
      double e = grad_check(f, x, 1e-5);
      CHECK(e < 1e-6);
    };
    check([](const Tensor& t) { return sum_all(t); });
    check([](const Tensor& t) { return mean_all(t); });
    check([](const Tensor& t) { return sum_all(mul(t, t)); });
    check([](const Tensor& t) { return mean_all(tanh_op(t)); });
    check([](const Tensor& t) { return sum_all(relu(t)); });
    check([](const Tensor& t) { return sum_all(leaky_relu(t, 0.2)); });
    check([](const Tensor& t) { return sum_all(abs_op(t)); });
    check([](const Tensor& t) { return mean_all(sqrt_op(add_scalar(mul(t, t), 1.0))); });
    check([](const Tensor& t) { return sum_all(divide(t, add_scalar(mul(t, t), 2.0))); });
    check([](const Tensor& t) {
      Tensor other = Tensor::from({6}, {0.3, -0.4, 0.5, 1.2, -1.1, 0.9});
      return sum_all(mul(add(t, other), sub(t, other)));
    });
  }
}

TEST_CASE("matmul and linear gradients match finite differences", "[tensor][grad]") {
  std::mt19937_64 rng(77);
  Tensor a = rand_tensor({3, 4}, rng, true);
  Tensor b = rand_tensor({4, 2}, rng);
  double e = grad_check([&](const Tensor& t) { return mean_all(matmul(t, b)); }, a, 1e-5);
  CHECK(e < 1e-6);

  Tensor bt = rand_tensor({3, 4}, rng);
  Tensor rhs = rand_tensor({4, 5}, rng, true);
  e = grad_check([&](const Tensor& t) { return mean_all(matmul(bt, t)); }, rhs, 1e-5);
  CHECK(e < 1e-6);

  Tensor x = rand_tensor({3, 6}, rng);
  Tensor w = rand_tensor({4, 6}, rng, true);
  Tensor bias = rand_tensor({4}, rng, true);
  e = grad_check([&](const Tensor& t) { return mean_all(linear(x, t, bias)); }, w, 1e-5);
  CHECK(e < 1e-6);
  e = grad_check([&](const Tensor& t) { return mean_all(linear(x, w, t)); }, bias, 1e-5);
  CHECK(e < 1e-6);
}

TEST_CASE("conv, pooling and upsampling gradients match finite differences", "[tensor][grad]") {
  std::mt19937_64 rng(99);
  Tensor x = rand_tensor({2, 3, 6, 6}, rng, true);
  Tensor k = rand_tensor({4, 3, 3, 3}, rng, true);
  Tensor bias = rand_tensor({4}, rng, true);

  double e = grad_check([&](const Tensor& t) { return mean_all(conv2d(t, k, bias, 1, 1)); }, x);
  CHECK(e < 1e-6);
  e = grad_check([&](const Tensor& t) { return mean_all(conv2d(x, t, bias, 1, 1)); }, k);
  CHECK(e < 1e-6);
  e = grad_check([&](const Tensor& t) { return mean_all(conv2d(x, k, t, 1, 1)); }, bias);
  CHECK(e < 1e-6);
  e = grad_check([&](const Tensor& t) { return mean_all(conv2d(t, k, bias, 2, 1)); }, x);
  CHECK(e < 1e-6);
  e = grad_check([&](const Tensor& t) { return mean_all(avg_pool2d(t)); }, x);
  CHECK(e < 1e-6);
  e = grad_check([&](const Tensor& t) { return mean_all(upsample_nearest2(t)); }, x);
  CHECK(e < 1e-6);
}

TEST_CASE("loss primitives pass finite-difference checks", "[tensor][grad]") {
  std::mt19937_64 rng(123);
  Tensor x = rand_tensor({2, 5}, rng, true);
  Tensor other = rand_tensor({2, 5}, rng);
  double e = grad_check([&](const Tensor& t) { return l1_distance(t, other); }, x);
  CHECK(e < 1e-6);

  Tensor targets = Tensor::zeros({2, 5});
  for (int64_t i = 0; i < targets.numel(); ++i) targets.data()[i] = (i % 2) ? 1.0 : 0.0;
  e = grad_check([&](const Tensor& t) { return bce_with_logits(t, targets); }, x);
  CHECK(e < 1e-6);
}

TEST_CASE("grad_check flags a corrupted backward rule", "[tensor]") {
  std::mt19937_64 rng(321);
  Tensor x = rand_tensor({8}, rng, true, -2, -1);  // all negative: exercises the faulted branch
  testing::set_backward_fault(true);
  double e = grad_check([](const Tensor& t) { return sum_all(leaky_relu(t, 0.2)); }, x);
  testing::set_backward_fault(false);
  CHECK(e > 0.1);
}

TEST_CASE("untaped regions and detach produce constants", "[tensor]") {
  Tensor x = Tensor::from({2}, {1.0, 2.0}, true);
  {
    NoGrad pause;
    Tensor y = mul(x, x);
    CHECK_FALSE(y.requires_grad());
  }
  Tensor d = mul(x, x).detach();
  CHECK_FALSE(d.requires_grad());
  Tensor loss = sum_all(mul(d, x));  // d acts as a constant
  loss.backward();
  CHECK(x.grad().data()[0] == Approx(1.0));
  CHECK(x.grad().data()[1] == Approx(4.0));
  Graph::get().clear();
}
