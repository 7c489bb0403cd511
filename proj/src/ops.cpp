#include "hyperstar/ops.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace hyperstar {

namespace {

using MatR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapR = Eigen::Map<MatR>;
using CMapR = Eigen::Map<const MatR>;

constexpr int kMaxDims = 8;

// Coalesced iteration plan for one output and two (possibly broadcast) operands.
struct BPlan {
  int nd = 0;
  int64_t size[kMaxDims];
  int64_t so[kMaxDims];
  int64_t sa[kMaxDims];
  int64_t sb[kMaxDims];
  Shape out_shape;
  int64_t out_numel = 1;
};

BPlan make_plan(const Shape& a, const Shape& b, const char* opname) {
  const int ra = static_cast<int>(a.size()), rb = static_cast<int>(b.size());
  const int ro = std::max(ra, rb);
  if (ro > kMaxDims) throw shape_error("rank too high in broadcast");
  BPlan p;
  p.out_shape.resize(static_cast<size_t>(ro));
  int64_t dims_o[kMaxDims], dims_a[kMaxDims], dims_b[kMaxDims];
  for (int i = 0; i < ro; ++i) {
    const int64_t da = (i < ro - ra) ? 1 : a[static_cast<size_t>(i - (ro - ra))];
    const int64_t db = (i < ro - rb) ? 1 : b[static_cast<size_t>(i - (ro - rb))];
    if (da != db && da != 1 && db != 1)
      throw shape_error(std::string(opname) + ": shapes " + shape_str(a) + " and " + shape_str(b) +
                        " do not broadcast");
    dims_a[i] = da;
    dims_b[i] = db;
    dims_o[i] = std::max(da, db);
    p.out_shape[static_cast<size_t>(i)] = dims_o[i];
    p.out_numel *= dims_o[i];
  }
  int64_t st_o[kMaxDims], st_a[kMaxDims], st_b[kMaxDims];
  int64_t acc_o = 1, acc_a = 1, acc_b = 1;
  for (int i = ro - 1; i >= 0; --i) {
    st_o[i] = acc_o;
    acc_o *= dims_o[i];
    st_a[i] = (dims_a[i] == 1) ? 0 : acc_a;
    acc_a *= dims_a[i];
    st_b[i] = (dims_b[i] == 1) ? 0 : acc_b;
    acc_b *= dims_b[i];
  }
  // Coalesce adjacent dims whose strides chain contiguously for all three views.
  // Blocks are built inner->outer, then reversed.
  int64_t csz[kMaxDims], co[kMaxDims], ca[kMaxDims], cb[kMaxDims];
  int nd = 0;
  for (int i = ro - 1; i >= 0; --i) {
    if (dims_o[i] == 1) continue;
    if (nd > 0 && st_o[i] == co[nd - 1] * csz[nd - 1] && st_a[i] == ca[nd - 1] * csz[nd - 1] &&
        st_b[i] == cb[nd - 1] * csz[nd - 1]) {
      csz[nd - 1] *= dims_o[i];
    } else {
      csz[nd] = dims_o[i];
      co[nd] = st_o[i];
      ca[nd] = st_a[i];
      cb[nd] = st_b[i];
      ++nd;
    }
  }
  p.nd = nd;
  for (int i = 0; i < nd; ++i) {  // store outer->inner
    p.size[i] = csz[nd - 1 - i];
    p.so[i] = co[nd - 1 - i];
    p.sa[i] = ca[nd - 1 - i];
    p.sb[i] = cb[nd - 1 - i];
  }
  return p;
}

// Calls f(out_index, a_index, b_index) over the whole plan, inner dim contiguous in out.
template <class F>
void plan_exec(const BPlan& p, F&& f) {
  if (p.nd == 0) {
    f(0, 0, 0);
    return;
  }
  const int nd = p.nd;
  int64_t cnt[kMaxDims] = {0};
  int64_t oi = 0, ai = 0, bi = 0;
  const int64_t n = p.size[nd - 1];
  const int64_t so = p.so[nd - 1], sa = p.sa[nd - 1], sb = p.sb[nd - 1];
  while (true) {
    for (int64_t i = 0; i < n; ++i) f(oi + i * so, ai + i * sa, bi + i * sb);
    int d = nd - 2;
    for (; d >= 0; --d) {
      ++cnt[d];
      oi += p.so[d];
      ai += p.sa[d];
      bi += p.sb[d];
      if (cnt[d] < p.size[d]) break;
      oi -= p.so[d] * p.size[d];
      ai -= p.sa[d] * p.size[d];
      bi -= p.sb[d] * p.size[d];
      cnt[d] = 0;
    }
    if (d < 0) break;
  }
}

void record(Tensor& out, std::vector<ImplPtr> ins, std::function<void(GraphNode&)> fn) {
  out.impl()->requires_grad = true;
  GraphNode node{out.impl(), std::move(ins), std::move(fn)};
  out.impl()->producer = Graph::get().add(std::move(node));
}

// Inputs that are plain constants (leaves nobody differentiates) can skip adjoint work.
bool needs_adj(const ImplPtr& in) { return !(in->leaf() && !in->requires_grad); }

enum class Arith { Add, Sub, Mul, Div };

Tensor arith(const Tensor& a, const Tensor& b, Arith kind, const char* name) {
  BPlan p = make_plan(a.shape(), b.shape(), name);
  Tensor out = Tensor::zeros(p.out_shape);
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  switch (kind) {
    case Arith::Add:
      plan_exec(p, [&](int64_t o, int64_t i, int64_t j) { po[o] = pa[i] + pb[j]; });
      break;
    case Arith::Sub:
      plan_exec(p, [&](int64_t o, int64_t i, int64_t j) { po[o] = pa[i] - pb[j]; });
      break;
    case Arith::Mul:
      plan_exec(p, [&](int64_t o, int64_t i, int64_t j) { po[o] = pa[i] * pb[j]; });
      break;
    case Arith::Div:
      plan_exec(p, [&](int64_t o, int64_t i, int64_t j) { po[o] = pa[i] / pb[j]; });
      break;
  }
  if (taping({&a, &b})) {
    record(out, {a.impl(), b.impl()}, [p, kind](GraphNode& n) {
      const double* dy = n.out->adj.data();
      ImplPtr& ia = n.ins[0];
      ImplPtr& ib = n.ins[1];
      const bool wa = needs_adj(ia), wb = needs_adj(ib);
      if (!wa && !wb) return;
      double* ga = wa ? ia->ensure_adj().data() : nullptr;
      double* gb = wb ? ib->ensure_adj().data() : nullptr;
      const double* pa = ia->data();
      const double* pb = ib->data();
      switch (kind) {
        case Arith::Add:
          plan_exec(p, [&](int64_t o, int64_t i, int64_t j) {
            if (ga) ga[i] += dy[o];
            if (gb) gb[j] += dy[o];
          });
          break;
        case Arith::Sub:
          plan_exec(p, [&](int64_t o, int64_t i, int64_t j) {
            if (ga) ga[i] += dy[o];
            if (gb) gb[j] -= dy[o];
          });
          break;
        case Arith::Mul:
          plan_exec(p, [&](int64_t o, int64_t i, int64_t j) {
            if (ga) ga[i] += dy[o] * pb[j];
            if (gb) gb[j] += dy[o] * pa[i];
          });
          break;
        case Arith::Div:
          plan_exec(p, [&](int64_t o, int64_t i, int64_t j) {
            if (ga) ga[i] += dy[o] / pb[j];
            if (gb) gb[j] -= dy[o] * pa[i] / (pb[j] * pb[j]);
          });
          break;
      }
    });
  }
  return out;
}

// Unary elementwise. dloc(x, y) is the local derivative dy/dx.
template <class Fwd, class Dloc>
Tensor unary(const Tensor& a, Fwd fwd, Dloc dloc) {
  Tensor out = Tensor::zeros(a.shape());
  const int64_t n = a.numel();
  const double* pa = a.data();
  double* po = out.data();
  for (int64_t i = 0; i < n; ++i) po[i] = fwd(pa[i]);
  if (taping({&a})) {
    ImplPtr oi = out.impl();
    record(out, {a.impl()}, [dloc, oi](GraphNode& nd) {
      if (!needs_adj(nd.ins[0])) return;
      const int64_t n = nd.ins[0]->numel();
      const double* dy = nd.out->adj.data();
      const double* px = nd.ins[0]->data();
      const double* py = oi->data();
      double* gx = nd.ins[0]->ensure_adj().data();
      for (int64_t i = 0; i < n; ++i) gx[i] += dy[i] * dloc(px[i], py[i]);
    });
  }
  return out;
}

bool g_backward_fault = false;

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return arith(a, b, Arith::Add, "add"); }
Tensor sub(const Tensor& a, const Tensor& b) { return arith(a, b, Arith::Sub, "sub"); }
Tensor mul(const Tensor& a, const Tensor& b) { return arith(a, b, Arith::Mul, "mul"); }
Tensor divide(const Tensor& a, const Tensor& b) { return arith(a, b, Arith::Div, "div"); }

Tensor add_scalar(const Tensor& a, double s) {
  return unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor scalar_mul(const Tensor& a, double s) {
  return unary(a, [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Tensor neg(const Tensor& a) {
  return unary(a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor relu(const Tensor& a) {
  return unary(a, [](double x) { return x > 0 ? x : 0.0; },
               [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor leaky_relu(const Tensor& a, double slope) {
  return unary(a, [slope](double x) { return x > 0 ? x : slope * x; },
               [slope](double x, double) {
                 const double neg = g_backward_fault ? -slope : slope;
                 return x > 0 ? 1.0 : neg;
               });
}

Tensor tanh_op(const Tensor& a) {
  return unary(a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Tensor abs_op(const Tensor& a) {
  return unary(a, [](double x) { return std::abs(x); }, [](double x, double) {
    return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
  });
}

Tensor sqrt_op(const Tensor& a) {
  return unary(a, [](double x) { return std::sqrt(x); },
               [](double, double y) { return 0.5 / y; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.ndim() != 2 || b.ndim() != 2)
    throw shape_error("matmul expects rank-2 operands, got " + shape_str(a.shape()) + " and " +
                      shape_str(b.shape()));
  if (a.size(1) != b.size(0))
    throw shape_error("matmul inner dimensions disagree: " + shape_str(a.shape()) + " vs " +
                      shape_str(b.shape()));
  const int64_t m = a.size(0), k = a.size(1), p = b.size(1);
  Tensor out = Tensor::zeros({m, p});
  {
    CMapR A(a.data(), m, k), B(b.data(), k, p);
    MapR Y(out.data(), m, p);
    Y.noalias() = A * B;
  }
  if (taping({&a, &b})) {
    record(out, {a.impl(), b.impl()}, [m, k, p](GraphNode& n) {
      CMapR dY(n.out->adj.data(), m, p);
      if (needs_adj(n.ins[0])) {
        CMapR B(n.ins[1]->data(), k, p);
        MapR dA(n.ins[0]->ensure_adj().data(), m, k);
        dA.noalias() += dY * B.transpose();
      }
      if (needs_adj(n.ins[1])) {
        CMapR A(n.ins[0]->data(), m, k);
        MapR dB(n.ins[1]->ensure_adj().data(), k, p);
        dB.noalias() += A.transpose() * dY;
      }
    });
  }
  return out;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.ndim() != 2 || w.ndim() != 2)
    throw shape_error("linear expects rank-2 input and weight, got " + shape_str(x.shape()) +
                      " and " + shape_str(w.shape()));
  if (x.size(1) != w.size(1))
    throw shape_error("linear width mismatch: input " + shape_str(x.shape()) + " vs weight " +
                      shape_str(w.shape()));
  const int64_t N = x.size(0), in = x.size(1), out_w = w.size(0);
  if (b.defined() && (b.ndim() != 1 || b.size(0) != out_w))
    throw shape_error("linear bias shape " + shape_str(b.shape()) + " does not match " +
                      std::to_string(out_w) + " outputs");
  Tensor y = Tensor::zeros({N, out_w});
  {
    CMapR X(x.data(), N, in), W(w.data(), out_w, in);
    MapR Y(y.data(), N, out_w);
    Y.noalias() = X * W.transpose();
    if (b.defined())
      Y.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.data(), out_w);
  }
  const bool tape = b.defined() ? taping({&x, &w, &b}) : taping({&x, &w});
  if (tape) {
    std::vector<ImplPtr> ins{x.impl(), w.impl()};
    if (b.defined()) ins.push_back(b.impl());
    record(y, std::move(ins), [N, in, out_w](GraphNode& n) {
      CMapR dY(n.out->adj.data(), N, out_w);
      if (needs_adj(n.ins[0])) {
        CMapR W(n.ins[1]->data(), out_w, in);
        MapR dX(n.ins[0]->ensure_adj().data(), N, in);
        dX.noalias() += dY * W;
      }
      if (needs_adj(n.ins[1])) {
        CMapR X(n.ins[0]->data(), N, in);
        MapR dW(n.ins[1]->ensure_adj().data(), out_w, in);
        dW.noalias() += dY.transpose() * X;
      }
      if (n.ins.size() > 2 && needs_adj(n.ins[2])) {
        // Plain ordered loop: Eigen's vectorized reduction peels by buffer
        // alignment, which varies per allocation and breaks bit-exact replay.
        double* db = n.ins[2]->ensure_adj().data();
        const double* dyp = n.out->adj.data();
        for (int64_t i = 0; i < N; ++i)
          for (int64_t j = 0; j < out_w; ++j) db[j] += dyp[i * out_w + j];
      }
    });
  }
  return y;
}

Tensor sum_all(const Tensor& a) {
  const int64_t n = a.numel();
  const double* pa = a.data();
  double s = 0;
  for (int64_t i = 0; i < n; ++i) s += pa[i];
  Tensor out = Tensor::from({1}, {s});
  if (taping({&a})) {
    record(out, {a.impl()}, [](GraphNode& nd) {
      if (!needs_adj(nd.ins[0])) return;
      const double dy = nd.out->adj[0];
      auto& g = nd.ins[0]->ensure_adj();
      for (double& v : g) v += dy;
    });
  }
  return out;
}

Tensor mean_all(const Tensor& a) {
  const int64_t n = a.numel();
  const double* pa = a.data();
  double s = 0;
  for (int64_t i = 0; i < n; ++i) s += pa[i];
  Tensor out = Tensor::from({1}, {s / static_cast<double>(n)});
  if (taping({&a})) {
    record(out, {a.impl()}, [n](GraphNode& nd) {
      if (!needs_adj(nd.ins[0])) return;
      const double dy = nd.out->adj[0] / static_cast<double>(n);
      auto& g = nd.ins[0]->ensure_adj();
      for (double& v : g) v += dy;
    });
  }
  return out;
}

namespace {

Tensor reduce_axes(const Tensor& a, const std::vector<int>& axes, bool mean) {
  Shape out_shape = a.shape();
  for (int ax : axes) {
    if (ax < 0 || ax >= a.ndim()) throw shape_error("reduction axis out of range");
    out_shape[static_cast<size_t>(ax)] = 1;
  }
  BPlan p = make_plan(out_shape, a.shape(), "reduce");
  const int64_t count = a.numel() / shape_numel(out_shape);
  const double scale = mean ? 1.0 / static_cast<double>(count) : 1.0;
  Tensor out = Tensor::zeros(out_shape);
  {
    double* acc = out.data();
    const double* px = a.data();
    plan_exec(p, [&](int64_t xi, int64_t oi, int64_t) { acc[oi] += px[xi]; });
    if (mean) {
      const int64_t n = out.numel();
      for (int64_t i = 0; i < n; ++i) acc[i] *= scale;
    }
  }
  if (taping({&a})) {
    record(out, {a.impl()}, [p, scale](GraphNode& nd) {
      if (!needs_adj(nd.ins[0])) return;
      const double* dy = nd.out->adj.data();
      double* gx = nd.ins[0]->ensure_adj().data();
      plan_exec(p, [&](int64_t xi, int64_t oi, int64_t) { gx[xi] += dy[oi] * scale; });
    });
  }
  return out;
}

}  // namespace

Tensor sum_axes(const Tensor& a, const std::vector<int>& axes) { return reduce_axes(a, axes, false); }
Tensor mean_axes(const Tensor& a, const std::vector<int>& axes) { return reduce_axes(a, axes, true); }

Tensor reshape(const Tensor& a, Shape s) {
  if (shape_numel(s) != a.numel())
    throw shape_error("reshape from " + shape_str(a.shape()) + " to " + shape_str(s) +
                      " changes element count");
  auto impl = std::make_shared<TensorImpl>(std::move(s), a.impl()->store);
  Tensor out(std::move(impl));
  if (taping({&a})) {
    record(out, {a.impl()}, [](GraphNode& nd) {
      if (!needs_adj(nd.ins[0])) return;
      axpy(nd.ins[0]->ensure_adj(), nd.out->adj);
    });
  }
  return out;
}

namespace {

// Row-major offset helpers for narrow/pad: treat tensor as [outer, dim, inner].
struct DimSplit {
  int64_t outer = 1, mid = 1, inner = 1;
};

DimSplit split_at(const Shape& s, int dim) {
  DimSplit d;
  for (int i = 0; i < static_cast<int>(s.size()); ++i) {
    const int64_t v = s[static_cast<size_t>(i)];
    if (i < dim)
      d.outer *= v;
    else if (i == dim)
      d.mid = v;
    else
      d.inner *= v;
  }
  return d;
}

}  // namespace

Tensor narrow(const Tensor& a, int dim, int64_t start, int64_t len) {
  if (dim < 0 || dim >= a.ndim()) throw shape_error("narrow dim out of range");
  if (start < 0 || len <= 0 || start + len > a.size(dim))
    throw shape_error("narrow range invalid for " + shape_str(a.shape()));
  Shape out_shape = a.shape();
  out_shape[static_cast<size_t>(dim)] = len;
  DimSplit d = split_at(a.shape(), dim);
  Tensor out = Tensor::zeros(out_shape);
  {
    const double* px = a.data();
    double* po = out.data();
    for (int64_t o = 0; o < d.outer; ++o)
      std::memcpy(po + o * len * d.inner, px + (o * d.mid + start) * d.inner,
                  static_cast<size_t>(len * d.inner) * sizeof(double));
  }
  if (taping({&a})) {
    record(out, {a.impl()}, [d, start, len](GraphNode& nd) {
      if (!needs_adj(nd.ins[0])) return;
      const double* dy = nd.out->adj.data();
      double* gx = nd.ins[0]->ensure_adj().data();
      for (int64_t o = 0; o < d.outer; ++o) {
        double* dst = gx + (o * d.mid + start) * d.inner;
        const double* src = dy + o * len * d.inner;
        for (int64_t i = 0; i < len * d.inner; ++i) dst[i] += src[i];
      }
    });
  }
  return out;
}

Tensor pad_dim_end(const Tensor& a, int dim, int64_t extra) {
  if (dim < 0 || dim >= a.ndim()) throw shape_error("pad dim out of range");
  if (extra < 0) throw shape_error("negative padding");
  if (extra == 0) {
    // No-op pad still yields a fresh tensor participating in the graph.
    return narrow(a, dim, 0, a.size(dim));
  }
  Shape out_shape = a.shape();
  out_shape[static_cast<size_t>(dim)] += extra;
  DimSplit d = split_at(a.shape(), dim);
  const int64_t mid_out = d.mid + extra;
  Tensor out = Tensor::zeros(out_shape);
  {
    const double* px = a.data();
    double* po = out.data();
    for (int64_t o = 0; o < d.outer; ++o)
      std::memcpy(po + o * mid_out * d.inner, px + o * d.mid * d.inner,
                  static_cast<size_t>(d.mid * d.inner) * sizeof(double));
  }
  if (taping({&a})) {
    record(out, {a.impl()}, [d, mid_out](GraphNode& nd) {
      if (!needs_adj(nd.ins[0])) return;
      const double* dy = nd.out->adj.data();
      double* gx = nd.ins[0]->ensure_adj().data();
      for (int64_t o = 0; o < d.outer; ++o) {
        double* dst = gx + o * d.mid * d.inner;
        const double* src = dy + o * mid_out * d.inner;
        for (int64_t i = 0; i < d.mid * d.inner; ++i) dst[i] += src[i];
      }
    });
  }
  return out;
}

Tensor l1_distance(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw shape_error("l1_distance shapes differ: " + shape_str(a.shape()) + " vs " +
                      shape_str(b.shape()));
  const int64_t n = a.numel();
  const double* pa = a.data();
  const double* pb = b.data();
  double s = 0;
  for (int64_t i = 0; i < n; ++i) s += std::abs(pa[i] - pb[i]);
  Tensor out = Tensor::from({1}, {s / static_cast<double>(n)});
  if (taping({&a, &b})) {
    record(out, {a.impl(), b.impl()}, [n](GraphNode& nd) {
      const double dy = nd.out->adj[0] / static_cast<double>(n);
      const double* pa = nd.ins[0]->data();
      const double* pb = nd.ins[1]->data();
      const bool wa = needs_adj(nd.ins[0]), wb = needs_adj(nd.ins[1]);
      double* ga = wa ? nd.ins[0]->ensure_adj().data() : nullptr;
      double* gb = wb ? nd.ins[1]->ensure_adj().data() : nullptr;
      for (int64_t i = 0; i < n; ++i) {
        const double d = pa[i] - pb[i];
        const double sgn = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
        if (ga) ga[i] += dy * sgn;
        if (gb) gb[i] -= dy * sgn;
      }
    });
  }
  return out;
}

Tensor bce_with_logits(const Tensor& logits, const Tensor& t01) {
  if (logits.shape() != t01.shape())
    throw shape_error("bce_with_logits shapes differ: " + shape_str(logits.shape()) + " vs " +
                      shape_str(t01.shape()));
  if (t01.requires_grad())
    throw value_error("bce_with_logits targets must not require gradients");
  const int64_t n = logits.numel();
  const double* px = logits.data();
  const double* pt = t01.data();
  double s = 0;
  for (int64_t i = 0; i < n; ++i) {
    const double x = px[i];
    s += std::max(x, 0.0) - x * pt[i] + std::log1p(std::exp(-std::abs(x)));
  }
  Tensor out = Tensor::from({1}, {s / static_cast<double>(n)});
  if (taping({&logits})) {
    record(out, {logits.impl(), t01.impl()}, [n](GraphNode& nd) {
      if (!needs_adj(nd.ins[0])) return;
      const double dy = nd.out->adj[0] / static_cast<double>(n);
      const double* px = nd.ins[0]->data();
      const double* pt = nd.ins[1]->data();
      double* gx = nd.ins[0]->ensure_adj().data();
      for (int64_t i = 0; i < n; ++i) {
        const double sig = 1.0 / (1.0 + std::exp(-px[i]));
        gx[i] += dy * (sig - pt[i]);
      }
    });
  }
  return out;
}

double grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor& x, double h) {
  Graph& g = Graph::get();
  const size_t mark = g.size();
  const bool saved_rg = x.requires_grad();
  x.set_requires_grad(true);
  x.zero_grad();
  Tensor y = f(x);
  if (y.numel() != 1) throw shape_error("grad_check needs a scalar-valued function");
  y.backward();
  std::vector<double> analytic(static_cast<size_t>(x.numel()), 0.0);
  if (x.impl()->grad) analytic = *x.impl()->grad;
  g.rollback(mark);
  x.zero_grad();
  x.set_requires_grad(saved_rg);

  double max_rel = 0;
  NoGrad pause;
  double* px = x.data();
  for (int64_t i = 0; i < x.numel(); ++i) {
    const double x0 = px[i];
    px[i] = x0 + h;
    const double fp = f(x).item();
    px[i] = x0 - h;
    const double fm = f(x).item();
    px[i] = x0;
    const double fd = (fp - fm) / (2 * h);
    const double an = analytic[static_cast<size_t>(i)];
    const double rel =
        std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-8});
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

namespace testing {
// Deliberately corrupts one backward rule so the gradient checker's failure
// path can be demonstrated end to end. Never enabled outside that fixture.
void set_backward_fault(bool on) { g_backward_fault = on; }
}  // namespace testing

}  // namespace hyperstar
