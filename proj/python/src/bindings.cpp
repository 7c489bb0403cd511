// Python bindings for the core operations: weight synthesis, convolution,
// grouped normalization, and the initializers. Arrays cross the boundary as
// float64 copies; everything runs forward-only with the tape off.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>

#include <cstring>
#include <random>

#include "hyperstar/algebra.hpp"
#include "hyperstar/dataset.hpp"
#include "hyperstar/init.hpp"
#include "hyperstar/norm.hpp"
#include "hyperstar/ops.hpp"
#include "hyperstar/tensor.hpp"

namespace py = pybind11;
using namespace hyperstar;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor to_tensor(const DoubleArray& a) {
  Shape s(static_cast<size_t>(a.ndim()));
  for (py::ssize_t i = 0; i < a.ndim(); ++i) s[static_cast<size_t>(i)] = a.shape(i);
  Tensor t = Tensor::zeros(std::move(s));
  std::memcpy(t.data(), a.data(), sizeof(double) * static_cast<size_t>(t.numel()));
  return t;
}

py::array_t<double> to_array(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  py::array_t<double> out(shape);
  std::memcpy(out.mutable_data(), t.data(), sizeof(double) * static_cast<size_t>(t.numel()));
  return out;
}

Quaternion to_quat(const DoubleArray& a) {
  if (a.size() != 4) throw py::value_error("quaternion needs exactly 4 components");
  const double* p = a.data();
  return {p[0], p[1], p[2], p[3]};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "hypercomplex layer operations";

  m.def("hamilton", [](const DoubleArray& p, const DoubleArray& q) {
    Quaternion r = hamilton_product(to_quat(p), to_quat(q));
    py::array_t<double> out(4);
    double* o = out.mutable_data();
    o[0] = r.q0; o[1] = r.q1; o[2] = r.q2; o[3] = r.q3;
    return out;
  }, py::arg("p"), py::arg("q"), "Hamilton product of two quaternions given as length-4 arrays.");

  m.def("kronecker", [](const DoubleArray& a, const DoubleArray& b) {
    NoGrad ng;
    return to_array(kronecker(to_tensor(a), to_tensor(b)));
  }, py::arg("a"), py::arg("b"), "Kronecker product of two matrices.");

  m.def("ph_compose_matrix", [](const DoubleArray& a, const DoubleArray& f) {
    NoGrad ng;
    return to_array(ph_compose_matrix(to_tensor(a), to_tensor(f)));
  }, py::arg("a"), py::arg("f"),
     "Synthesize a dense weight sum_i A[i] (x) F[i]: A [n,n,n], F [n,o,i] -> [n*o, n*i].");

  m.def("ph_compose_conv", [](const DoubleArray& a, const DoubleArray& f) {
    NoGrad ng;
    return to_array(ph_compose_conv(to_tensor(a), to_tensor(f)));
  }, py::arg("a"), py::arg("f"),
     "Synthesize a conv kernel with interleaved components: A [n,n,n], F [n,fo,fc,kh,kw].");

  m.def("quaternion_conv_kernel", [](const DoubleArray& f) {
    NoGrad ng;
    return to_array(quaternion_conv_kernel(to_tensor(f)));
  }, py::arg("f"), "Assemble the fixed Hamilton-pattern conv kernel from F [4,fo,fc,kh,kw].");

  m.def("conv2d", [](const DoubleArray& x, const DoubleArray& k, int stride, int pad) {
    NoGrad ng;
    return to_array(conv2d(to_tensor(x), to_tensor(k), stride, pad));
  }, py::arg("x"), py::arg("k"), py::arg("stride") = 1, py::arg("pad") = 0,
     "2-D convolution: x [N,C,H,W], k [O,C,kh,kw].");

  m.def("hyper_instance_norm",
        [](const DoubleArray& x, int group, const DoubleArray& gamma, const DoubleArray& beta,
           double eps) {
    NoGrad ng;
    return to_array(hyper_instance_norm(to_tensor(x), group, to_tensor(gamma), to_tensor(beta), eps));
  }, py::arg("x"), py::arg("group"), py::arg("gamma"), py::arg("beta"), py::arg("eps") = 1e-5,
     "Grouped instance norm: per-component spatial means, one pooled variance per block.");

  m.def("hyper_adain",
        [](const DoubleArray& x, int group, const DoubleArray& raw_scale, const DoubleArray& shift,
           double eps) {
    NoGrad ng;
    return to_array(hyper_adain(to_tensor(x), group, to_tensor(raw_scale), to_tensor(shift), eps));
  }, py::arg("x"), py::arg("group"), py::arg("raw_scale"), py::arg("shift"), py::arg("eps") = 1e-5,
     "Style-conditioned grouped norm: scale (1+raw_scale) per block, shift per channel.");

  m.def("init_a", [](const std::string& scheme, int n, uint64_t seed) {
    Tensor a = Tensor::zeros({n, n, n});
    std::mt19937_64 rng(seed);
    init_A(a, n, a_scheme_from_string(scheme), rng);
    return to_array(a);
  }, py::arg("scheme"), py::arg("n"), py::arg("seed") = 0,
     "Draw the algebra tensor A [n,n,n]: 'xavier', 'quat_pattern' (n=4), or 'rand_integer'.");

  m.def("to_model_channels", [](const DoubleArray& rgb, int64_t n) {
    NoGrad ng;
    return to_array(to_model_channels(to_tensor(rgb), n));
  }, py::arg("rgb"), py::arg("n"), "RGB batch [B,3,S,S] -> model layout [B,n,S,S].");

  m.def("to_rgb_channels", [](const DoubleArray& x, int64_t n) {
    NoGrad ng;
    return to_array(to_rgb_channels(to_tensor(x), n));
  }, py::arg("x"), py::arg("n"), "Model layout [B,n,S,S] -> RGB batch [B,3,S,S].");
}
