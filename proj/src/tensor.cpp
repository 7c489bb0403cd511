#include "hyperstar/tensor.hpp"

#include <sstream>

namespace hyperstar {

int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) {
    if (d <= 0) throw shape_error("non-positive dimension in shape " + shape_str(s));
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

Tensor Tensor::zeros(Shape s, bool rg) {
  auto store = std::make_shared<std::vector<double>>(static_cast<size_t>(shape_numel(s)), 0.0);
  auto impl = std::make_shared<TensorImpl>(std::move(s), std::move(store));
  impl->requires_grad = rg;
  return Tensor(std::move(impl));
}

Tensor Tensor::full(Shape s, double v, bool rg) {
  Tensor t = zeros(std::move(s), rg);
  std::fill(t.impl()->store->begin(), t.impl()->store->end(), v);
  return t;
}

Tensor Tensor::from(Shape s, std::vector<double> data, bool rg) {
  if (shape_numel(s) != static_cast<int64_t>(data.size()))
    throw shape_error("data length " + std::to_string(data.size()) + " does not fill shape " +
                      shape_str(s));
  auto store = std::make_shared<std::vector<double>>(std::move(data));
  auto impl = std::make_shared<TensorImpl>(std::move(s), std::move(store));
  impl->requires_grad = rg;
  return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double v, bool rg) { return from({1}, {v}, rg); }

double Tensor::item() const {
  if (numel() != 1) throw shape_error("item() on non-scalar tensor " + shape_str(shape()));
  return data()[0];
}

void Tensor::set_requires_grad(bool rg) {
  if (!impl_->leaf()) throw value_error("requires_grad can only be toggled on leaf tensors");
  impl_->requires_grad = rg;
}

Tensor Tensor::grad() const {
  Tensor g = Tensor::zeros(shape());
  if (impl_->grad) std::copy(impl_->grad->begin(), impl_->grad->end(), g.data());
  return g;
}

void Tensor::zero_grad() {
  if (impl_->grad) std::fill(impl_->grad->begin(), impl_->grad->end(), 0.0);
}

Tensor Tensor::detach() const {
  auto impl = std::make_shared<TensorImpl>(impl_->shape, impl_->store);
  return Tensor(std::move(impl));
}

Tensor Tensor::clone() const {
  auto store = std::make_shared<std::vector<double>>(*impl_->store);
  auto impl = std::make_shared<TensorImpl>(impl_->shape, std::move(store));
  return Tensor(std::move(impl));
}

void Tensor::backward() const { Graph::get().backward(impl_); }

Graph& Graph::get() {
  static Graph g;
  return g;
}

void Graph::backward(const ImplPtr& root) {
  if (root->numel() != 1)
    throw shape_error("backward requires a scalar, got " + shape_str(root->shape));
  if (root->leaf())
    throw value_error("backward on a tensor detached from the gradient graph");

  root->ensure_adj()[0] += 1.0;
  const int64_t top = root->producer;
  for (int64_t i = top; i >= 0; --i) {
    GraphNode& n = nodes_[static_cast<size_t>(i)];
    if (n.out->adj.empty()) continue;  // not an ancestor of the loss
    n.backprop(n);
  }
  // Flush leaf adjoints into .grad (accumulating) and drop all scratch.
  for (int64_t i = 0; i <= top; ++i) {
    GraphNode& n = nodes_[static_cast<size_t>(i)];
    for (ImplPtr& in : n.ins) {
      if (in->adj.empty()) continue;
      if (in->leaf() && in->requires_grad) axpy(in->ensure_grad(), in->adj);
      in->adj.clear();
      in->adj.shrink_to_fit();
    }
    n.out->adj.clear();
    n.out->adj.shrink_to_fit();
  }
}

void axpy(std::vector<double>& y, const std::vector<double>& x) {
  const size_t n = x.size();
  double* yp = y.data();
  const double* xp = x.data();
  for (size_t i = 0; i < n; ++i) yp[i] += xp[i];
}

}  // namespace hyperstar
