#pragma once

#include <array>

#include "hyperstar/tensor.hpp"

namespace hyperstar {

struct Quaternion {
  double q0 = 0, q1 = 0, q2 = 0, q3 = 0;
};

Quaternion hamilton_product(const Quaternion& p, const Quaternion& q);
double quat_norm(const Quaternion& q);

// Sign/position table of the Hamilton-product weight matrix:
// entry (out_component, in_component) -> {block index, sign}.
struct QuatCell {
  int block;
  double sign;
};
const std::array<std::array<QuatCell, 4>, 4>& hamilton_table();

// 4r x 4c block matrix assembled from four equally shaped blocks W0..W3
// following the Hamilton table. Pure utility (not differentiable).
Tensor hamilton_matrix(const Tensor& w0, const Tensor& w1, const Tensor& w2, const Tensor& w3);

// Kronecker product a[m,n] ⊗ b[p,q] -> [mp,nq]; differentiable in both.
Tensor kronecker(const Tensor& a, const Tensor& b);

// Weight synthesis H = sum_i A_i ⊗ F_i, differentiable in A and F.
//
// Matrix form: A[n,n,n], F[n,fo,fi] -> H[n*fo, n*fi], component-major blocks
// (H block (ao,ac) accumulates A[i,ao,ac] * F_i).
Tensor ph_compose_matrix(const Tensor& A, const Tensor& F);
//
// Convolutional form: A[n,n,n], F[n,fo,fc,kh,kw] -> K[fo*n, fc*n, kh, kw] with
// hypercomplex components interleaved per feature channel:
// K[fo*n+ao][fc*n+ac] = sum_i A[i,ao,ac] * F[i,fo,fc].
Tensor ph_compose_conv(const Tensor& A, const Tensor& F);

// Independent fixed-algebra route used to cross-check ph_compose_conv:
// assembles the interleaved 4-component kernel directly from the Hamilton
// table. F[4,fo,fc,kh,kw] -> K[fo*4, fc*4, kh, kw]; differentiable in F.
Tensor quaternion_conv_kernel(const Tensor& F);

// The four algebra matrices that make ph synthesis reproduce the Hamilton
// matrix; filled into A[4,4,4].
void fill_quaternion_pattern(double* A);

}  // namespace hyperstar
