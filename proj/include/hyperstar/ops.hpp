#pragma once

#include <cstdint>
#include <functional>

#include "hyperstar/tensor.hpp"

namespace hyperstar {

// Elementwise with numpy-style broadcasting (right-aligned, size-1 dims stretch).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor divide(const Tensor& a, const Tensor& b);

Tensor add_scalar(const Tensor& a, double s);
Tensor scalar_mul(const Tensor& a, double s);
Tensor neg(const Tensor& a);

Tensor relu(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope = 0.2);
Tensor tanh_op(const Tensor& a);
Tensor abs_op(const Tensor& a);
Tensor sqrt_op(const Tensor& a);

// a[m,k] @ b[k,p]
Tensor matmul(const Tensor& a, const Tensor& b);
// x[N,in] @ w[out,in]^T + b[out]; pass undefined bias to skip
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

// Cross-correlation, zero padding. x[N,C,H,W], k[O,C,kh,kw], optional bias[O].
Tensor conv2d(const Tensor& x, const Tensor& k, int stride, int padding);
Tensor conv2d(const Tensor& x, const Tensor& k, const Tensor& bias, int stride, int padding);

Tensor avg_pool2d(const Tensor& x);        // 2x2, stride 2
Tensor upsample_nearest2(const Tensor& x); // x2

Tensor sum_all(const Tensor& a);   // -> [1]
Tensor mean_all(const Tensor& a);  // -> [1]
// Reduce over `axes` (unique, in range); result keeps reduced dims as size 1.
Tensor sum_axes(const Tensor& a, const std::vector<int>& axes);
Tensor mean_axes(const Tensor& a, const std::vector<int>& axes);

Tensor reshape(const Tensor& a, Shape s);
Tensor narrow(const Tensor& a, int dim, int64_t start, int64_t len);
Tensor pad_dim_end(const Tensor& a, int dim, int64_t extra);  // zero-fill

Tensor l1_distance(const Tensor& a, const Tensor& b);             // mean |a-b| -> [1]
Tensor bce_with_logits(const Tensor& logits, const Tensor& t01);  // mean, stable -> [1]

// Max relative error between analytic gradient of f at x and central differences.
double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor& x, double h = 1e-5);

namespace testing {
// Fixture for the checker's failure path: flips the sign of the leaky_relu
// negative-slope derivative while enabled.
void set_backward_fault(bool on);
}  // namespace testing

}  // namespace hyperstar
