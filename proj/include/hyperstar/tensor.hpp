#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperstar {

using Shape = std::vector<int64_t>;

struct shape_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct value_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int64_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

// One allocation per tensor; reshape produces a second impl aliasing `store`.
struct TensorImpl {
  Shape shape;
  std::shared_ptr<std::vector<double>> store;
  bool requires_grad = false;
  std::unique_ptr<std::vector<double>> grad;  // allocated lazily, leaves only
  std::vector<double> adj;                    // scratch adjoint, live only inside backward()
  int64_t producer = -1;                      // graph node that made this, -1 for leaves

  TensorImpl(Shape s, std::shared_ptr<std::vector<double>> st)
      : shape(std::move(s)), store(std::move(st)) {}
  int64_t numel() const { return shape_numel(shape); }
  double* data() { return store->data(); }
  const double* data() const { return store->data(); }
  bool leaf() const { return producer < 0; }
  std::vector<double>& ensure_adj() {
    if (adj.empty()) adj.assign(static_cast<size_t>(numel()), 0.0);
    return adj;
  }
  std::vector<double>& ensure_grad() {
    if (!grad) grad = std::make_unique<std::vector<double>>(static_cast<size_t>(numel()), 0.0);
    return *grad;
  }
};

using ImplPtr = std::shared_ptr<TensorImpl>;

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(ImplPtr impl) : impl_(std::move(impl)) {}

  static Tensor zeros(Shape s, bool requires_grad = false);
  static Tensor full(Shape s, double v, bool requires_grad = false);
  static Tensor from(Shape s, std::vector<double> data, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  int ndim() const { return static_cast<int>(impl_->shape.size()); }
  int64_t numel() const { return impl_->numel(); }
  int64_t size(int d) const { return impl_->shape.at(static_cast<size_t>(d)); }

  double* data() { return impl_->data(); }
  const double* data() const { return impl_->data(); }
  double item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool rg);

  bool has_grad() const { return impl_->grad != nullptr; }
  // Gradient buffer as a plain tensor (copy); zeros if never touched by backward.
  Tensor grad() const;
  void zero_grad();

  Tensor detach() const;
  Tensor clone() const;  // deep copy, leaf, keeps requires_grad=false
  void backward() const;

  ImplPtr& impl() { return impl_; }
  const ImplPtr& impl() const { return impl_; }

 private:
  ImplPtr impl_;
};

struct GraphNode {
  ImplPtr out;
  std::vector<ImplPtr> ins;
  // Reads out->adj, accumulates into ins' adj buffers.
  std::function<void(GraphNode&)> backprop;
};

// Append-only tape. One per process: training is single-threaded by contract,
// and tensors outside the tape are freely shareable.
class Graph {
 public:
  static Graph& get();

  bool recording() const { return recording_; }
  void set_recording(bool r) { recording_ = r; }

  int64_t add(GraphNode n) {
    nodes_.push_back(std::move(n));
    return static_cast<int64_t>(nodes_.size()) - 1;
  }
  size_t size() const { return nodes_.size(); }
  void rollback(size_t mark) { nodes_.resize(mark); }
  void clear() { nodes_.clear(); }

  void backward(const ImplPtr& root);

 private:
  std::vector<GraphNode> nodes_;
  bool recording_ = true;
};

// RAII tape pause for inference-only forwards.
class NoGrad {
 public:
  NoGrad() : prev_(Graph::get().recording()) { Graph::get().set_recording(false); }
  ~NoGrad() { Graph::get().set_recording(prev_); }
  NoGrad(const NoGrad&) = delete;
  NoGrad& operator=(const NoGrad&) = delete;

 private:
  bool prev_;
};

// True when this op invocation should be recorded on the tape.
inline bool taping(std::initializer_list<const Tensor*> ins) {
  if (!Graph::get().recording()) return false;
  for (const Tensor* t : ins)
    if ((*t).defined() && t->requires_grad()) return true;
  return false;
}

// y += x, sizes must match
void axpy(std::vector<double>& y, const std::vector<double>& x);

}  // namespace hyperstar
