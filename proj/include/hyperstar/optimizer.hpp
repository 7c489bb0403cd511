#pragma once

#include <vector>

#include "hyperstar/layers.hpp"

namespace hyperstar {

// Bias-corrected Adam. Parameters and moment buffers are kept on the f32
// grid (updated in f64, then rounded) so that 32-bit checkpoints round-trip
// without loss.
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Param> params, double lr, double beta1, double beta2, double eps = 1e-8);

  void step();       // applies grads accumulated on the parameters
  void zero_grad();  // clears parameter gradients

  const std::vector<Param>& params() const { return params_; }
  std::vector<double>& m(size_t i) { return m_[i]; }
  std::vector<double>& v(size_t i) { return v_[i]; }
  int64_t step_count() const { return step_count_; }
  void set_step_count(int64_t t) { step_count_ = t; }

  double lr = 1e-4, beta1 = 0.0, beta2 = 0.99, eps = 1e-8;

 private:
  std::vector<Param> params_;
  std::vector<std::vector<double>> m_, v_;
  int64_t step_count_ = 0;
};

}  // namespace hyperstar
