#include "hyperstar/optimizer.hpp"

#include <cmath>

#include "hyperstar/init.hpp"

namespace hyperstar {

Adam::Adam(std::vector<Param> params, double lr_, double beta1_, double beta2_, double eps_)
    : lr(lr_), beta1(beta1_), beta2(beta2_), eps(eps_), params_(std::move(params)) {
  m_.resize(params_.size());
  v_.resize(params_.size());
  for (size_t i = 0; i < params_.size(); ++i) {
    m_[i].assign(static_cast<size_t>(params_[i].value.numel()), 0.0);
    v_[i].assign(static_cast<size_t>(params_[i].value.numel()), 0.0);
  }
}

void Adam::step() {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i].value;
    if (!p.has_grad()) continue;  // never touched by backward this round
    const std::vector<double>& g = *p.impl()->grad;
    std::vector<double>& m = m_[i];
    std::vector<double>& v = v_[i];
    double* w = p.data();
    for (size_t k = 0; k < g.size(); ++k) {
      m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
      v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      w[k] = snap_f32(w[k] - lr * mhat / (std::sqrt(vhat) + eps));
      m[k] = snap_f32(m[k]);
      v[k] = snap_f32(v[k]);
    }
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.value.zero_grad();
}

}  // namespace hyperstar
