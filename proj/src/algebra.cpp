#include "hyperstar/algebra.hpp"

#include <cmath>

namespace hyperstar {

Quaternion hamilton_product(const Quaternion& p, const Quaternion& q) {
  return {p.q0 * q.q0 - p.q1 * q.q1 - p.q2 * q.q2 - p.q3 * q.q3,
          p.q0 * q.q1 + p.q1 * q.q0 + p.q2 * q.q3 - p.q3 * q.q2,
          p.q0 * q.q2 - p.q1 * q.q3 + p.q2 * q.q0 + p.q3 * q.q1,
          p.q0 * q.q3 + p.q1 * q.q2 - p.q2 * q.q1 + p.q3 * q.q0};
}

double quat_norm(const Quaternion& q) {
  return std::sqrt(q.q0 * q.q0 + q.q1 * q.q1 + q.q2 * q.q2 + q.q3 * q.q3);
}

const std::array<std::array<QuatCell, 4>, 4>& hamilton_table() {
  static const std::array<std::array<QuatCell, 4>, 4> t = {{
      {{{0, 1.0}, {1, -1.0}, {2, -1.0}, {3, -1.0}}},
      {{{1, 1.0}, {0, 1.0}, {3, -1.0}, {2, 1.0}}},
      {{{2, 1.0}, {3, 1.0}, {0, 1.0}, {1, -1.0}}},
      {{{3, 1.0}, {2, -1.0}, {1, 1.0}, {0, 1.0}}},
  }};
  return t;
}

Tensor hamilton_matrix(const Tensor& w0, const Tensor& w1, const Tensor& w2, const Tensor& w3) {
  const Tensor* w[4] = {&w0, &w1, &w2, &w3};
  for (int i = 0; i < 4; ++i) {
    if (w[i]->ndim() != 2 || w[i]->shape() != w0.shape())
      throw shape_error("hamilton_matrix needs four equally shaped rank-2 blocks");
  }
  const int64_t r = w0.size(0), c = w0.size(1);
  Tensor h = Tensor::zeros({4 * r, 4 * c});
  const auto& tab = hamilton_table();
  double* ph = h.data();
  for (int bo = 0; bo < 4; ++bo)
    for (int bc = 0; bc < 4; ++bc) {
      const QuatCell cell = tab[static_cast<size_t>(bo)][static_cast<size_t>(bc)];
      const double* pw = w[cell.block]->data();
      for (int64_t i = 0; i < r; ++i) {
        double* dst = ph + (bo * r + i) * 4 * c + bc * c;
        const double* src = pw + i * c;
        for (int64_t j = 0; j < c; ++j) dst[j] = cell.sign * src[j];
      }
    }
  return h;
}

namespace {

void record_node(Tensor& out, std::vector<ImplPtr> ins, std::function<void(GraphNode&)> fn) {
  out.impl()->requires_grad = true;
  out.impl()->producer = Graph::get().add({out.impl(), std::move(ins), std::move(fn)});
}

bool wants(const ImplPtr& in) { return !(in->leaf() && !in->requires_grad); }

}  // namespace

Tensor kronecker(const Tensor& a, const Tensor& b) {
  if (a.ndim() != 2 || b.ndim() != 2)
    throw shape_error("kronecker expects rank-2 operands, got " + shape_str(a.shape()) + " and " +
                      shape_str(b.shape()));
  const int64_t m = a.size(0), n = a.size(1), p = b.size(0), q = b.size(1);
  Tensor h = Tensor::zeros({m * p, n * q});
  {
    const double* pa = a.data();
    const double* pb = b.data();
    double* ph = h.data();
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < n; ++j) {
        const double av = pa[i * n + j];
        for (int64_t k = 0; k < p; ++k) {
          double* dst = ph + (i * p + k) * n * q + j * q;
          const double* src = pb + k * q;
          for (int64_t l = 0; l < q; ++l) dst[l] = av * src[l];
        }
      }
  }
  if (taping({&a, &b})) {
    record_node(h, {a.impl(), b.impl()}, [m, n, p, q](GraphNode& nd) {
      const double* dh = nd.out->adj.data();
      const bool wa = wants(nd.ins[0]), wb = wants(nd.ins[1]);
      if (!wa && !wb) return;
      double* ga = wa ? nd.ins[0]->ensure_adj().data() : nullptr;
      double* gb = wb ? nd.ins[1]->ensure_adj().data() : nullptr;
      const double* pa = nd.ins[0]->data();
      const double* pb = nd.ins[1]->data();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) {
          const double av = pa[i * n + j];
          double acc = 0;
          for (int64_t k = 0; k < p; ++k) {
            const double* drow = dh + (i * p + k) * n * q + j * q;
            const double* brow = pb + k * q;
            double* grow = gb ? gb + k * q : nullptr;
            for (int64_t l = 0; l < q; ++l) {
              if (ga) acc += drow[l] * brow[l];
              if (grow) grow[l] += av * drow[l];
            }
          }
          if (ga) ga[i * n + j] += acc;
        }
    });
  }
  return h;
}

namespace {

void check_A(const Tensor& A) {
  if (A.ndim() != 3 || A.size(0) != A.size(1) || A.size(1) != A.size(2))
    throw shape_error("algebra matrices must be [n,n,n], got " + shape_str(A.shape()));
}

}  // namespace

Tensor ph_compose_matrix(const Tensor& A, const Tensor& F) {
  check_A(A);
  if (F.ndim() != 3)
    throw shape_error("matrix weight blocks must be [n,fo,fi], got " + shape_str(F.shape()));
  const int64_t n = A.size(0);
  if (F.size(0) != n)
    throw shape_error("algebra count " + std::to_string(n) + " != block count " +
                      std::to_string(F.size(0)));
  const int64_t fo = F.size(1), fi = F.size(2);
  Tensor h = Tensor::zeros({n * fo, n * fi});
  {
    const double* pa = A.data();
    const double* pf = F.data();
    double* ph = h.data();
    for (int64_t i = 0; i < n; ++i) {
      const double* fi_blk = pf + i * fo * fi;
      for (int64_t ao = 0; ao < n; ++ao)
        for (int64_t ac = 0; ac < n; ++ac) {
          const double av = pa[(i * n + ao) * n + ac];
          if (av == 0.0) continue;
          for (int64_t r = 0; r < fo; ++r) {
            double* dst = ph + (ao * fo + r) * n * fi + ac * fi;
            const double* src = fi_blk + r * fi;
            for (int64_t c = 0; c < fi; ++c) dst[c] += av * src[c];
          }
        }
    }
  }
  if (taping({&A, &F})) {
    record_node(h, {A.impl(), F.impl()}, [n, fo, fi](GraphNode& nd) {
      const double* dh = nd.out->adj.data();
      const bool wa = wants(nd.ins[0]), wf = wants(nd.ins[1]);
      if (!wa && !wf) return;
      double* ga = wa ? nd.ins[0]->ensure_adj().data() : nullptr;
      double* gf = wf ? nd.ins[1]->ensure_adj().data() : nullptr;
      const double* pa = nd.ins[0]->data();
      const double* pf = nd.ins[1]->data();
      for (int64_t i = 0; i < n; ++i) {
        const double* fi_blk = pf + i * fo * fi;
        double* gf_blk = gf ? gf + i * fo * fi : nullptr;
        for (int64_t ao = 0; ao < n; ++ao)
          for (int64_t ac = 0; ac < n; ++ac) {
            const double av = pa[(i * n + ao) * n + ac];
            double acc = 0;
            for (int64_t r = 0; r < fo; ++r) {
              const double* drow = dh + (ao * fo + r) * n * fi + ac * fi;
              const double* frow = fi_blk + r * fi;
              double* grow = gf_blk ? gf_blk + r * fi : nullptr;
              for (int64_t c = 0; c < fi; ++c) {
                if (ga) acc += drow[c] * frow[c];
                if (grow) grow[c] += av * drow[c];
              }
            }
            if (ga) ga[(i * n + ao) * n + ac] += acc;
          }
      }
    });
  }
  return h;
}

Tensor ph_compose_conv(const Tensor& A, const Tensor& F) {
  check_A(A);
  if (F.ndim() != 5)
    throw shape_error("conv weight blocks must be [n,fo,fc,kh,kw], got " + shape_str(F.shape()));
  const int64_t n = A.size(0);
  if (F.size(0) != n)
    throw shape_error("algebra count " + std::to_string(n) + " != block count " +
                      std::to_string(F.size(0)));
  const int64_t fo = F.size(1), fc = F.size(2), kh = F.size(3), kw = F.size(4);
  const int64_t kk = kh * kw;
  Tensor k = Tensor::zeros({fo * n, fc * n, kh, kw});
  {
    const double* pa = A.data();
    const double* pf = F.data();
    double* pk = k.data();
    for (int64_t i = 0; i < n; ++i)
      for (int64_t r = 0; r < fo; ++r)
        for (int64_t c = 0; c < fc; ++c) {
          const double* src = pf + ((i * fo + r) * fc + c) * kk;
          for (int64_t ao = 0; ao < n; ++ao)
            for (int64_t ac = 0; ac < n; ++ac) {
              const double av = pa[(i * n + ao) * n + ac];
              if (av == 0.0) continue;
              double* dst = pk + ((r * n + ao) * fc * n + (c * n + ac)) * kk;
              for (int64_t t = 0; t < kk; ++t) dst[t] += av * src[t];
            }
        }
  }
  if (taping({&A, &F})) {
    record_node(k, {A.impl(), F.impl()}, [n, fo, fc, kk](GraphNode& nd) {
      const double* dk = nd.out->adj.data();
      const bool wa = wants(nd.ins[0]), wf = wants(nd.ins[1]);
      if (!wa && !wf) return;
      double* ga = wa ? nd.ins[0]->ensure_adj().data() : nullptr;
      double* gf = wf ? nd.ins[1]->ensure_adj().data() : nullptr;
      const double* pa = nd.ins[0]->data();
      const double* pf = nd.ins[1]->data();
      for (int64_t i = 0; i < n; ++i)
        for (int64_t r = 0; r < fo; ++r)
          for (int64_t c = 0; c < fc; ++c) {
            const int64_t f_off = ((i * fo + r) * fc + c) * kk;
            const double* frow = pf + f_off;
            double* grow = gf ? gf + f_off : nullptr;
            for (int64_t ao = 0; ao < n; ++ao)
              for (int64_t ac = 0; ac < n; ++ac) {
                const double av = pa[(i * n + ao) * n + ac];
                const double* drow = dk + ((r * n + ao) * fc * n + (c * n + ac)) * kk;
                double acc = 0;
                for (int64_t t = 0; t < kk; ++t) {
                  if (ga) acc += drow[t] * frow[t];
                  if (grow) grow[t] += av * drow[t];
                }
                if (ga) ga[(i * n + ao) * n + ac] += acc;
              }
          }
    });
  }
  return k;
}

Tensor quaternion_conv_kernel(const Tensor& F) {
  if (F.ndim() != 5 || F.size(0) != 4)
    throw shape_error("quaternion kernel blocks must be [4,fo,fc,kh,kw], got " +
                      shape_str(F.shape()));
  const int64_t fo = F.size(1), fc = F.size(2), kh = F.size(3), kw = F.size(4);
  const int64_t kk = kh * kw;
  const auto& tab = hamilton_table();
  Tensor k = Tensor::zeros({fo * 4, fc * 4, kh, kw});
  {
    const double* pf = F.data();
    double* pk = k.data();
    for (int64_t r = 0; r < fo; ++r)
      for (int64_t c = 0; c < fc; ++c)
        for (int ao = 0; ao < 4; ++ao)
          for (int ac = 0; ac < 4; ++ac) {
            const QuatCell cell = tab[static_cast<size_t>(ao)][static_cast<size_t>(ac)];
            const double* src = pf + ((cell.block * fo + r) * fc + c) * kk;
            double* dst = pk + ((r * 4 + ao) * fc * 4 + (c * 4 + ac)) * kk;
            for (int64_t t = 0; t < kk; ++t) dst[t] = cell.sign * src[t];
          }
  }
  if (taping({&F})) {
    record_node(k, {F.impl()}, [fo, fc, kk](GraphNode& nd) {
      if (!wants(nd.ins[0])) return;
      const auto& tab = hamilton_table();
      const double* dk = nd.out->adj.data();
      double* gf = nd.ins[0]->ensure_adj().data();
      for (int64_t r = 0; r < fo; ++r)
        for (int64_t c = 0; c < fc; ++c)
          for (int ao = 0; ao < 4; ++ao)
            for (int ac = 0; ac < 4; ++ac) {
              const QuatCell cell = tab[static_cast<size_t>(ao)][static_cast<size_t>(ac)];
              double* grow = gf + ((cell.block * fo + r) * fc + c) * kk;
              const double* drow = dk + ((r * 4 + ao) * fc * 4 + (c * 4 + ac)) * kk;
              for (int64_t t = 0; t < kk; ++t) grow[t] += cell.sign * drow[t];
            }
    });
  }
  return k;
}

void fill_quaternion_pattern(double* A) {
  for (int i = 0; i < 64; ++i) A[i] = 0.0;
  const auto& tab = hamilton_table();
  for (int ao = 0; ao < 4; ++ao)
    for (int ac = 0; ac < 4; ++ac) {
      const QuatCell cell = tab[static_cast<size_t>(ao)][static_cast<size_t>(ac)];
      A[(cell.block * 4 + ao) * 4 + ac] = cell.sign;
    }
}

}  // namespace hyperstar
