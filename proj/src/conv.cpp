#include <Eigen/Dense>

#include <cstring>

#include "hyperstar/ops.hpp"

namespace hyperstar {

namespace {

using MatR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapR = Eigen::Map<MatR>;
using CMapR = Eigen::Map<const MatR>;

struct ConvDims {
  int64_t N, C, H, W, O, kh, kw, Ho, Wo;
  int stride, pad;
  int64_t ckk() const { return C * kh * kw; }
  int64_t hw_out() const { return Ho * Wo; }
};

// Scratch shared by forward and backward; single-threaded training context.
std::vector<double>& col_scratch() {
  static thread_local std::vector<double> buf;
  return buf;
}
std::vector<double>& col_scratch2() {
  static thread_local std::vector<double> buf;
  return buf;
}

// col[(c*kh+ky)*kw+kx][oy*Wo+ox] = x[c][oy*stride-pad+ky][ox*stride-pad+kx] or 0.
void im2col(const double* x, const ConvDims& d, double* col) {
  const int64_t HW = d.hw_out();
  for (int64_t c = 0; c < d.C; ++c) {
    const double* xc = x + c * d.H * d.W;
    for (int64_t ky = 0; ky < d.kh; ++ky) {
      for (int64_t kx = 0; kx < d.kw; ++kx) {
        double* row = col + ((c * d.kh + ky) * d.kw + kx) * HW;
        for (int64_t oy = 0; oy < d.Ho; ++oy) {
          const int64_t iy = oy * d.stride - d.pad + ky;
          double* out_row = row + oy * d.Wo;
          if (iy < 0 || iy >= d.H) {
            std::memset(out_row, 0, static_cast<size_t>(d.Wo) * sizeof(double));
            continue;
          }
          const double* in_row = xc + iy * d.W;
          if (d.stride == 1) {
            const int64_t shift = kx - d.pad;  // ix = ox + shift
            int64_t lo = std::max<int64_t>(0, -shift);
            int64_t hi = std::min<int64_t>(d.Wo, d.W - shift);
            if (lo > hi) lo = hi = 0;
            if (lo > 0) std::memset(out_row, 0, static_cast<size_t>(lo) * sizeof(double));
            if (hi > lo)
              std::memcpy(out_row + lo, in_row + lo + shift,
                          static_cast<size_t>(hi - lo) * sizeof(double));
            if (hi < d.Wo)
              std::memset(out_row + hi, 0, static_cast<size_t>(d.Wo - hi) * sizeof(double));
          } else {
            for (int64_t ox = 0; ox < d.Wo; ++ox) {
              const int64_t ix = ox * d.stride - d.pad + kx;
              out_row[ox] = (ix < 0 || ix >= d.W) ? 0.0 : in_row[ix];
            }
          }
        }
      }
    }
  }
}

// Scatter-add transpose of im2col.
void col2im_add(const double* col, const ConvDims& d, double* gx) {
  const int64_t HW = d.hw_out();
  for (int64_t c = 0; c < d.C; ++c) {
    double* xc = gx + c * d.H * d.W;
    for (int64_t ky = 0; ky < d.kh; ++ky) {
      for (int64_t kx = 0; kx < d.kw; ++kx) {
        const double* row = col + ((c * d.kh + ky) * d.kw + kx) * HW;
        for (int64_t oy = 0; oy < d.Ho; ++oy) {
          const int64_t iy = oy * d.stride - d.pad + ky;
          if (iy < 0 || iy >= d.H) continue;
          double* dst = xc + iy * d.W;
          const double* src = row + oy * d.Wo;
          for (int64_t ox = 0; ox < d.Wo; ++ox) {
            const int64_t ix = ox * d.stride - d.pad + kx;
            if (ix >= 0 && ix < d.W) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

void record_node(Tensor& out, std::vector<ImplPtr> ins, std::function<void(GraphNode&)> fn) {
  out.impl()->requires_grad = true;
  out.impl()->producer = Graph::get().add({out.impl(), std::move(ins), std::move(fn)});
}

bool wants(const ImplPtr& in) { return !(in->leaf() && !in->requires_grad); }

Tensor conv2d_impl(const Tensor& x, const Tensor& k, const Tensor& bias, int stride, int pad) {
  if (x.ndim() != 4 || k.ndim() != 4)
    throw shape_error("conv2d expects x[N,C,H,W] and k[O,C,kh,kw], got " + shape_str(x.shape()) +
                      " and " + shape_str(k.shape()));
  if (x.size(1) != k.size(1))
    throw shape_error("conv2d channel mismatch: input " + shape_str(x.shape()) + " vs kernel " +
                      shape_str(k.shape()));
  if (stride < 1 || pad < 0) throw value_error("conv2d needs stride >= 1 and padding >= 0");
  ConvDims d;
  d.N = x.size(0);
  d.C = x.size(1);
  d.H = x.size(2);
  d.W = x.size(3);
  d.O = k.size(0);
  d.kh = k.size(2);
  d.kw = k.size(3);
  d.stride = stride;
  d.pad = pad;
  d.Ho = (d.H + 2 * pad - d.kh) / stride + 1;
  d.Wo = (d.W + 2 * pad - d.kw) / stride + 1;
  if (d.H + 2 * pad < d.kh || d.W + 2 * pad < d.kw || d.Ho <= 0 || d.Wo <= 0)
    throw shape_error("conv2d output would be empty for input " + shape_str(x.shape()));
  if (bias.defined() && (bias.ndim() != 1 || bias.size(0) != d.O))
    throw shape_error("conv2d bias shape " + shape_str(bias.shape()) + " does not match " +
                      std::to_string(d.O) + " output channels");

  Tensor y = Tensor::zeros({d.N, d.O, d.Ho, d.Wo});
  const int64_t HW = d.hw_out();
  {
    auto& col = col_scratch();
    col.resize(static_cast<size_t>(d.ckk() * HW));
    CMapR K(k.data(), d.O, d.ckk());
    for (int64_t s = 0; s < d.N; ++s) {
      im2col(x.data() + s * d.C * d.H * d.W, d, col.data());
      CMapR Col(col.data(), d.ckk(), HW);
      MapR Y(y.data() + s * d.O * HW, d.O, HW);
      Y.noalias() = K * Col;
      if (bias.defined()) Y.colwise() += Eigen::Map<const Eigen::VectorXd>(bias.data(), d.O);
    }
  }

  const bool tape = bias.defined() ? taping({&x, &k, &bias}) : taping({&x, &k});
  if (tape) {
    std::vector<ImplPtr> ins{x.impl(), k.impl()};
    if (bias.defined()) ins.push_back(bias.impl());
    record_node(y, std::move(ins), [d, HW](GraphNode& n) {
      const bool wx = wants(n.ins[0]), wk = wants(n.ins[1]);
      const bool wb = n.ins.size() > 2 && wants(n.ins[2]);
      if (!wx && !wk && !wb) return;
      const double* dy = n.out->adj.data();
      const double* xd = n.ins[0]->data();
      double* gx = wx ? n.ins[0]->ensure_adj().data() : nullptr;
      double* gk = wk ? n.ins[1]->ensure_adj().data() : nullptr;
      double* gb = wb ? n.ins[2]->ensure_adj().data() : nullptr;
      auto& col = col_scratch();
      col.resize(static_cast<size_t>(d.ckk() * HW));
      auto& tmp = col_scratch2();
      if (wx) tmp.resize(static_cast<size_t>(d.ckk() * HW));
      CMapR K(n.ins[1]->data(), d.O, d.ckk());
      for (int64_t s = 0; s < d.N; ++s) {
        CMapR dY(dy + s * d.O * HW, d.O, HW);
        if (wk) {
          im2col(xd + s * d.C * d.H * d.W, d, col.data());
          CMapR Col(col.data(), d.ckk(), HW);
          MapR dK(gk, d.O, d.ckk());
          dK.noalias() += dY * Col.transpose();
        }
        if (wx) {
          MapR T(tmp.data(), d.ckk(), HW);
          T.noalias() = K.transpose() * dY;
          col2im_add(tmp.data(), d, gx + s * d.C * d.H * d.W);
        }
        if (gb) {
          // Plain ordered loop: Eigen's vectorized reduction peels by buffer
          // alignment, which varies per allocation and breaks bit-exact replay.
          const double* row = dy + s * d.O * HW;
          for (int64_t o = 0; o < d.O; ++o) {
            double acc = 0;
            for (int64_t t = 0; t < HW; ++t) acc += row[o * HW + t];
            gb[o] += acc;
          }
        }
      }
    });
  }
  return y;
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& k, int stride, int padding) {
  return conv2d_impl(x, k, Tensor(), stride, padding);
}

Tensor conv2d(const Tensor& x, const Tensor& k, const Tensor& bias, int stride, int padding) {
  return conv2d_impl(x, k, bias, stride, padding);
}

Tensor avg_pool2d(const Tensor& x) {
  if (x.ndim() != 4) throw shape_error("avg_pool2d expects [N,C,H,W], got " + shape_str(x.shape()));
  const int64_t N = x.size(0), C = x.size(1), H = x.size(2), W = x.size(3);
  if (H % 2 || W % 2)
    throw shape_error("avg_pool2d needs even spatial dims, got " + shape_str(x.shape()));
  const int64_t Ho = H / 2, Wo = W / 2;
  Tensor y = Tensor::zeros({N, C, Ho, Wo});
  {
    const double* px = x.data();
    double* py = y.data();
    for (int64_t nc = 0; nc < N * C; ++nc) {
      const double* xc = px + nc * H * W;
      double* yc = py + nc * Ho * Wo;
      for (int64_t oy = 0; oy < Ho; ++oy)
        for (int64_t ox = 0; ox < Wo; ++ox) {
          const double* p = xc + 2 * oy * W + 2 * ox;
          yc[oy * Wo + ox] = 0.25 * (p[0] + p[1] + p[W] + p[W + 1]);
        }
    }
  }
  if (taping({&x})) {
    record_node(y, {x.impl()}, [N, C, H, W, Ho, Wo](GraphNode& n) {
      if (!wants(n.ins[0])) return;
      const double* dy = n.out->adj.data();
      double* gx = n.ins[0]->ensure_adj().data();
      for (int64_t nc = 0; nc < N * C; ++nc) {
        double* xc = gx + nc * H * W;
        const double* yc = dy + nc * Ho * Wo;
        for (int64_t oy = 0; oy < Ho; ++oy)
          for (int64_t ox = 0; ox < Wo; ++ox) {
            const double g = 0.25 * yc[oy * Wo + ox];
            double* p = xc + 2 * oy * W + 2 * ox;
            p[0] += g;
            p[1] += g;
            p[W] += g;
            p[W + 1] += g;
          }
      }
    });
  }
  return y;
}

Tensor upsample_nearest2(const Tensor& x) {
  if (x.ndim() != 4)
    throw shape_error("upsample_nearest2 expects [N,C,H,W], got " + shape_str(x.shape()));
  const int64_t N = x.size(0), C = x.size(1), H = x.size(2), W = x.size(3);
  const int64_t Ho = H * 2, Wo = W * 2;
  Tensor y = Tensor::zeros({N, C, Ho, Wo});
  {
    const double* px = x.data();
    double* py = y.data();
    for (int64_t nc = 0; nc < N * C; ++nc) {
      const double* xc = px + nc * H * W;
      double* yc = py + nc * Ho * Wo;
      for (int64_t iy = 0; iy < H; ++iy)
        for (int64_t ix = 0; ix < W; ++ix) {
          const double v = xc[iy * W + ix];
          double* p = yc + 2 * iy * Wo + 2 * ix;
          p[0] = v;
          p[1] = v;
          p[Wo] = v;
          p[Wo + 1] = v;
        }
    }
  }
  if (taping({&x})) {
    record_node(y, {x.impl()}, [N, C, H, W, Wo](GraphNode& n) {
      if (!wants(n.ins[0])) return;
      const double* dy = n.out->adj.data();
      double* gx = n.ins[0]->ensure_adj().data();
      const int64_t Ho = H * 2;
      for (int64_t nc = 0; nc < N * C; ++nc) {
        double* xc = gx + nc * H * W;
        const double* yc = dy + nc * Ho * Wo;
        for (int64_t iy = 0; iy < H; ++iy)
          for (int64_t ix = 0; ix < W; ++ix) {
            const double* p = yc + 2 * iy * Wo + 2 * ix;
            xc[iy * W + ix] += p[0] + p[1] + p[Wo] + p[Wo + 1];
          }
      }
    });
  }
  return y;
}

}  // namespace hyperstar
