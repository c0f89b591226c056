// cstk/ops.hpp
//
// Copyright (c)  2026  The cstk authors
//
// Differentiable tensor operations.  Every op validates shapes and either
// returns a correct-shape output or throws ShapeError; there is no implicit
// broadcasting.  Passing a null tape runs the op in inference mode.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "cstk/common.hpp"
#include "cstk/tape.hpp"
#include "cstk/tensor.hpp"

namespace cstk {
namespace ops {

template <typename Real>
using EMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Real>
using MapM = Eigen::Map<EMat<Real>>;
template <typename Real>
using CMapM = Eigen::Map<const EMat<Real>>;

template <typename Real>
inline Real* ensure_grad(TensorStorage<Real>& s) {
  if (s.grad.empty()) s.grad.assign(s.value.size(), Real(0));
  return s.grad.data();
}

template <typename Real>
inline MapM<Real> value_map(TensorStorage<Real>& s, int r, int c) {
  return MapM<Real>(s.value.data(), r, c);
}
template <typename Real>
inline CMapM<Real> grad_map(const TensorStorage<Real>& s, int r, int c) {
  return CMapM<Real>(s.grad.data(), r, c);
}

inline void check(bool ok, const std::string& msg) {
  if (!ok) throw ShapeError(msg);
}

// ---------------------------------------------------------------------------
// matmul and friends

template <typename Real>
Tensor<Real> matmul(Tape<Real>* tape, const Tensor<Real>& a,
                    const Tensor<Real>& b) {
  check(a.ndim() == 2 && b.ndim() == 2, "matmul: operands must be 2-D");
  check(a.dim(1) == b.dim(0), "matmul: inner dims differ " + a.shape_string() +
                                  " vs " + b.shape_string());
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor<Real> out({m, n});
  MapM<Real>(out.data(), m, n).noalias() =
      CMapM<Real>(a.data(), m, k) * CMapM<Real>(b.data(), k, n);
  if (tape) {
    tape->record([as = a.storage(), bs = b.storage(), os = out.storage(), m, k,
                  n] {
      if (os->grad.empty()) return;
      CMapM<Real> go(os->grad.data(), m, n);
      CMapM<Real> av(as->value.data(), m, k);
      CMapM<Real> bv(bs->value.data(), k, n);
      MapM<Real>(ensure_grad(*as), m, k).noalias() += go * bv.transpose();
      MapM<Real>(ensure_grad(*bs), k, n).noalias() += av.transpose() * go;
    });
  }
  return out;
}

// A · Bᵀ with B stored row-major [n x k].
template <typename Real>
Tensor<Real> matmul_nt(Tape<Real>* tape, const Tensor<Real>& a,
                       const Tensor<Real>& b) {
  check(a.ndim() == 2 && b.ndim() == 2, "matmul_nt: operands must be 2-D");
  check(a.dim(1) == b.dim(1), "matmul_nt: inner dims differ");
  const int m = a.dim(0), k = a.dim(1), n = b.dim(0);
  Tensor<Real> out({m, n});
  MapM<Real>(out.data(), m, n).noalias() =
      CMapM<Real>(a.data(), m, k) * CMapM<Real>(b.data(), n, k).transpose();
  if (tape) {
    tape->record([as = a.storage(), bs = b.storage(), os = out.storage(), m, k,
                  n] {
      if (os->grad.empty()) return;
      CMapM<Real> go(os->grad.data(), m, n);
      CMapM<Real> av(as->value.data(), m, k);
      CMapM<Real> bv(bs->value.data(), n, k);
      MapM<Real>(ensure_grad(*as), m, k).noalias() += go * bv;
      MapM<Real>(ensure_grad(*bs), n, k).noalias() += go.transpose() * av;
    });
  }
  return out;
}

// X·W + bias (bias broadcast over rows; pass an undefined tensor to skip it).
template <typename Real>
Tensor<Real> linear(Tape<Real>* tape, const Tensor<Real>& x,
                    const Tensor<Real>& w, const Tensor<Real>& bias) {
  check(x.ndim() == 2 && w.ndim() == 2, "linear: operands must be 2-D");
  check(x.dim(1) == w.dim(0), "linear: input cols " + x.shape_string() +
                                  " do not match weights " + w.shape_string());
  const int n = x.dim(0), din = x.dim(1), dout = w.dim(1);
  if (bias.defined())
    check(bias.ndim() == 1 && bias.dim(0) == dout, "linear: bad bias shape");
  Tensor<Real> out({n, dout});
  MapM<Real> o(out.data(), n, dout);
  o.noalias() = CMapM<Real>(x.data(), n, din) * CMapM<Real>(w.data(), din, dout);
  if (bias.defined())
    o.rowwise() +=
        Eigen::Map<const Eigen::RowVector<Real, Eigen::Dynamic>>(bias.data(),
                                                                 dout);
  if (tape) {
    auto bs = bias.defined() ? bias.storage() : nullptr;
    tape->record([xs = x.storage(), ws = w.storage(), bs, os = out.storage(), n,
                  din, dout] {
      if (os->grad.empty()) return;
      CMapM<Real> go(os->grad.data(), n, dout);
      CMapM<Real> xv(xs->value.data(), n, din);
      CMapM<Real> wv(ws->value.data(), din, dout);
      MapM<Real>(ensure_grad(*xs), n, din).noalias() += go * wv.transpose();
      MapM<Real>(ensure_grad(*ws), din, dout).noalias() += xv.transpose() * go;
      if (bs) {
        Eigen::Map<Eigen::RowVector<Real, Eigen::Dynamic>> gb(ensure_grad(*bs),
                                                              dout);
        gb += go.colwise().sum();
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// elementwise

template <typename Real, typename Fwd, typename Bwd>
Tensor<Real> elementwise_binary(Tape<Real>* tape, const Tensor<Real>& a,
                                const Tensor<Real>& b, Fwd fwd, Bwd bwd,
                                const char* name) {
  check(a.same_dims(b), std::string(name) + ": shape mismatch " +
                            a.shape_string() + " vs " + b.shape_string());
  Tensor<Real> out(a.dims());
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.data()[i] = fwd(a.data()[i], b.data()[i]);
  if (tape) {
    tape->record([as = a.storage(), bs = b.storage(), os = out.storage(), n,
                  bwd] {
      if (os->grad.empty()) return;
      Real* ga = ensure_grad(*as);
      Real* gb = ensure_grad(*bs);
      for (std::size_t i = 0; i < n; ++i)
        bwd(os->grad[i], as->value[i], bs->value[i], ga[i], gb[i]);
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> add(Tape<Real>* tape, const Tensor<Real>& a, const Tensor<Real>& b) {
  return elementwise_binary<Real>(
      tape, a, b, [](Real x, Real y) { return x + y; },
      [](Real g, Real, Real, Real& ga, Real& gb) {
        ga += g;
        gb += g;
      },
      "add");
}

template <typename Real>
Tensor<Real> sub(Tape<Real>* tape, const Tensor<Real>& a, const Tensor<Real>& b) {
  return elementwise_binary<Real>(
      tape, a, b, [](Real x, Real y) { return x - y; },
      [](Real g, Real, Real, Real& ga, Real& gb) {
        ga += g;
        gb -= g;
      },
      "sub");
}

template <typename Real>
Tensor<Real> mul(Tape<Real>* tape, const Tensor<Real>& a, const Tensor<Real>& b) {
  return elementwise_binary<Real>(
      tape, a, b, [](Real x, Real y) { return x * y; },
      [](Real g, Real x, Real y, Real& ga, Real& gb) {
        ga += g * y;
        gb += g * x;
      },
      "mul");
}

template <typename Real, typename Fwd, typename Bwd>
Tensor<Real> elementwise_unary(Tape<Real>* tape, const Tensor<Real>& a, Fwd fwd,
                               Bwd bwd) {
  Tensor<Real> out(a.dims());
  const std::size_t n = a.numel();
  for (std::size_t i = 0; i < n; ++i) out.data()[i] = fwd(a.data()[i]);
  if (tape) {
    tape->record([as = a.storage(), os = out.storage(), n, bwd] {
      if (os->grad.empty()) return;
      Real* ga = ensure_grad(*as);
      for (std::size_t i = 0; i < n; ++i)
        ga[i] += bwd(os->grad[i], as->value[i], os->value[i]);
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> scale(Tape<Real>* tape, const Tensor<Real>& a, Real c) {
  return elementwise_unary<Real>(
      tape, a, [c](Real x) { return c * x; },
      [c](Real g, Real, Real) { return c * g; });
}

template <typename Real>
Tensor<Real> sigmoid(Tape<Real>* tape, const Tensor<Real>& a) {
  return elementwise_unary<Real>(
      tape, a,
      [](Real x) {
        // Branch keeps exp() argument negative for stability.
        if (x >= Real(0)) return Real(1) / (Real(1) + std::exp(-x));
        const Real e = std::exp(x);
        return e / (Real(1) + e);
      },
      [](Real g, Real, Real y) { return g * y * (Real(1) - y); });
}

template <typename Real>
Tensor<Real> tanh_op(Tape<Real>* tape, const Tensor<Real>& a) {
  return elementwise_unary<Real>(
      tape, a, [](Real x) { return std::tanh(x); },
      [](Real g, Real, Real y) { return g * (Real(1) - y * y); });
}

template <typename Real>
Tensor<Real> relu(Tape<Real>* tape, const Tensor<Real>& a) {
  return elementwise_unary<Real>(
      tape, a, [](Real x) { return x > Real(0) ? x : Real(0); },
      [](Real g, Real x, Real) { return x > Real(0) ? g : Real(0); });
}

// ---------------------------------------------------------------------------
// row-wise softmax family

template <typename Real>
Tensor<Real> log_softmax_rows(Tape<Real>* tape, const Tensor<Real>& x) {
  check(x.ndim() == 2 && x.dim(1) >= 1, "log_softmax: expects [N x K], K >= 1");
  x.require_finite("log_softmax input");
  const int n = x.dim(0), k = x.dim(1);
  Tensor<Real> out({n, k});
  for (int i = 0; i < n; ++i) {
    const Real* row = x.data() + static_cast<std::size_t>(i) * k;
    Real* orow = out.data() + static_cast<std::size_t>(i) * k;
    Real mx = row[0];
    for (int j = 1; j < k; ++j) mx = std::max(mx, row[j]);
    Real sum = Real(0);
    for (int j = 0; j < k; ++j) sum += std::exp(row[j] - mx);
    const Real lse = mx + std::log(sum);
    for (int j = 0; j < k; ++j) orow[j] = row[j] - lse;
  }
  if (tape) {
    tape->record([xs = x.storage(), os = out.storage(), n, k] {
      if (os->grad.empty()) return;
      Real* gx = ensure_grad(*xs);
      for (int i = 0; i < n; ++i) {
        const std::size_t off = static_cast<std::size_t>(i) * k;
        Real gsum = Real(0);
        for (int j = 0; j < k; ++j) gsum += os->grad[off + j];
        for (int j = 0; j < k; ++j)
          gx[off + j] += os->grad[off + j] - std::exp(os->value[off + j]) * gsum;
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> softmax_rows(Tape<Real>* tape, const Tensor<Real>& x) {
  check(x.ndim() == 2 && x.dim(1) >= 1, "softmax: expects [N x K], K >= 1");
  const int n = x.dim(0), k = x.dim(1);
  Tensor<Real> out({n, k});
  for (int i = 0; i < n; ++i) {
    const Real* row = x.data() + static_cast<std::size_t>(i) * k;
    Real* orow = out.data() + static_cast<std::size_t>(i) * k;
    Real mx = row[0];
    for (int j = 1; j < k; ++j) mx = std::max(mx, row[j]);
    Real sum = Real(0);
    for (int j = 0; j < k; ++j) {
      orow[j] = std::exp(row[j] - mx);
      sum += orow[j];
    }
    for (int j = 0; j < k; ++j) orow[j] /= sum;
  }
  if (tape) {
    tape->record([xs = x.storage(), os = out.storage(), n, k] {
      if (os->grad.empty()) return;
      Real* gx = ensure_grad(*xs);
      for (int i = 0; i < n; ++i) {
        const std::size_t off = static_cast<std::size_t>(i) * k;
        Real dot = Real(0);
        for (int j = 0; j < k; ++j) dot += os->grad[off + j] * os->value[off + j];
        for (int j = 0; j < k; ++j)
          gx[off + j] += os->value[off + j] * (os->grad[off + j] - dot);
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// layer norm (per row)

template <typename Real>
Tensor<Real> layer_norm_rows(Tape<Real>* tape, const Tensor<Real>& x,
                             const Tensor<Real>& gain, const Tensor<Real>& bias,
                             Real eps = Real(1e-5)) {
  check(x.ndim() == 2, "layer_norm: expects 2-D input");
  const int n = x.dim(0), d = x.dim(1);
  check(gain.ndim() == 1 && gain.dim(0) == d, "layer_norm: bad gain shape");
  check(bias.ndim() == 1 && bias.dim(0) == d, "layer_norm: bad bias shape");
  Tensor<Real> out({n, d});
  Tensor<Real> xhat({n, d});   // kept for the backward pass
  std::vector<Real> inv_std(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Real* row = x.data() + static_cast<std::size_t>(i) * d;
    Real mean = Real(0);
    for (int j = 0; j < d; ++j) mean += row[j];
    mean /= Real(d);
    Real var = Real(0);
    for (int j = 0; j < d; ++j) var += (row[j] - mean) * (row[j] - mean);
    var /= Real(d);
    const Real istd = Real(1) / std::sqrt(var + eps);
    inv_std[static_cast<std::size_t>(i)] = istd;
    Real* xh = xhat.data() + static_cast<std::size_t>(i) * d;
    Real* orow = out.data() + static_cast<std::size_t>(i) * d;
    for (int j = 0; j < d; ++j) {
      xh[j] = (row[j] - mean) * istd;
      orow[j] = xh[j] * gain.data()[j] + bias.data()[j];
    }
  }
  if (tape) {
    tape->record([xs = x.storage(), gs = gain.storage(), bs = bias.storage(),
                  os = out.storage(), xh = xhat.storage(), inv_std, n, d] {
      if (os->grad.empty()) return;
      Real* gx = ensure_grad(*xs);
      Real* gg = ensure_grad(*gs);
      Real* gb = ensure_grad(*bs);
      for (int i = 0; i < n; ++i) {
        const std::size_t off = static_cast<std::size_t>(i) * d;
        Real sum_gxh = Real(0), sum_gxh_xh = Real(0);
        for (int j = 0; j < d; ++j) {
          const Real go = os->grad[off + j];
          gb[j] += go;
          gg[j] += go * xh->value[off + j];
          const Real gxh = go * gs->value[static_cast<std::size_t>(j)];
          sum_gxh += gxh;
          sum_gxh_xh += gxh * xh->value[off + j];
        }
        const Real istd = inv_std[static_cast<std::size_t>(i)];
        for (int j = 0; j < d; ++j) {
          const Real gxh = os->grad[off + j] * gs->value[static_cast<std::size_t>(j)];
          gx[off + j] += istd * (gxh - sum_gxh / Real(d) -
                                 xh->value[off + j] * sum_gxh_xh / Real(d));
        }
      }
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// slicing / concatenation / gathering

template <typename Real>
Tensor<Real> slice_rows(Tape<Real>* tape, const Tensor<Real>& x, int r0, int r1) {
  check(x.ndim() == 2, "slice_rows: expects 2-D input");
  check(0 <= r0 && r0 < r1 && r1 <= x.dim(0), "slice_rows: bad range");
  const int d = x.dim(1), n = r1 - r0;
  Tensor<Real> out({n, d});
  std::copy(x.data() + static_cast<std::size_t>(r0) * d,
            x.data() + static_cast<std::size_t>(r1) * d, out.data());
  if (tape) {
    tape->record([xs = x.storage(), os = out.storage(), r0, n, d] {
      if (os->grad.empty()) return;
      Real* gx = ensure_grad(*xs);
      for (std::size_t i = 0; i < static_cast<std::size_t>(n) * d; ++i)
        gx[static_cast<std::size_t>(r0) * d + i] += os->grad[i];
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> slice_cols(Tape<Real>* tape, const Tensor<Real>& x, int c0, int c1) {
  check(x.ndim() == 2, "slice_cols: expects 2-D input");
  check(0 <= c0 && c0 < c1 && c1 <= x.dim(1), "slice_cols: bad range");
  const int n = x.dim(0), d = x.dim(1), w = c1 - c0;
  Tensor<Real> out({n, w});
  for (int i = 0; i < n; ++i)
    std::copy(x.data() + static_cast<std::size_t>(i) * d + c0,
              x.data() + static_cast<std::size_t>(i) * d + c1,
              out.data() + static_cast<std::size_t>(i) * w);
  if (tape) {
    tape->record([xs = x.storage(), os = out.storage(), c0, n, d, w] {
      if (os->grad.empty()) return;
      Real* gx = ensure_grad(*xs);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < w; ++j)
          gx[static_cast<std::size_t>(i) * d + c0 + j] +=
              os->grad[static_cast<std::size_t>(i) * w + j];
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> concat_rows(Tape<Real>* tape, const std::vector<Tensor<Real>>& parts) {
  check(!parts.empty(), "concat_rows: no parts");
  const int d = parts[0].cols();
  int total = 0;
  for (const auto& p : parts) {
    check(p.ndim() == 2 && p.dim(1) == d, "concat_rows: column mismatch");
    total += p.dim(0);
  }
  Tensor<Real> out({total, d});
  int at = 0;
  for (const auto& p : parts) {
    std::copy(p.data(), p.data() + p.numel(),
              out.data() + static_cast<std::size_t>(at) * d);
    at += p.dim(0);
  }
  if (tape) {
    std::vector<std::shared_ptr<TensorStorage<Real>>> srcs;
    for (const auto& p : parts) srcs.push_back(p.storage());
    tape->record([srcs, os = out.storage(), d] {
      if (os->grad.empty()) return;
      std::size_t at = 0;
      for (auto& s : srcs) {
        Real* g = ensure_grad(*s);
        for (std::size_t i = 0; i < s->value.size(); ++i) g[i] += os->grad[at + i];
        at += s->value.size();
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> concat_cols(Tape<Real>* tape, const std::vector<Tensor<Real>>& parts) {
  check(!parts.empty(), "concat_cols: no parts");
  const int n = parts[0].rows();
  int total = 0;
  for (const auto& p : parts) {
    check(p.ndim() == 2 && p.dim(0) == n, "concat_cols: row mismatch");
    total += p.dim(1);
  }
  Tensor<Real> out({n, total});
  int at = 0;
  for (const auto& p : parts) {
    const int w = p.dim(1);
    for (int i = 0; i < n; ++i)
      std::copy(p.data() + static_cast<std::size_t>(i) * w,
                p.data() + static_cast<std::size_t>(i + 1) * w,
                out.data() + static_cast<std::size_t>(i) * total + at);
    at += w;
  }
  if (tape) {
    std::vector<std::shared_ptr<TensorStorage<Real>>> srcs;
    std::vector<int> widths;
    for (const auto& p : parts) {
      srcs.push_back(p.storage());
      widths.push_back(p.dim(1));
    }
    tape->record([srcs, widths, os = out.storage(), n, total] {
      if (os->grad.empty()) return;
      int at = 0;
      for (std::size_t pi = 0; pi < srcs.size(); ++pi) {
        Real* g = ensure_grad(*srcs[pi]);
        const int w = widths[pi];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < w; ++j)
            g[static_cast<std::size_t>(i) * w + j] +=
                os->grad[static_cast<std::size_t>(i) * total + at + j];
        at += w;
      }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> select_rows(Tape<Real>* tape, const Tensor<Real>& x,
                         const std::vector<int>& idx) {
  check(x.ndim() == 2, "select_rows: expects 2-D input");
  check(!idx.empty(), "select_rows: empty selection");
  const int d = x.dim(1);
  for (int i : idx) check(0 <= i && i < x.dim(0), "select_rows: index out of range");
  Tensor<Real> out({static_cast<int>(idx.size()), d});
  for (std::size_t k = 0; k < idx.size(); ++k)
    std::copy(x.data() + static_cast<std::size_t>(idx[k]) * d,
              x.data() + static_cast<std::size_t>(idx[k] + 1) * d,
              out.data() + k * d);
  if (tape) {
    tape->record([xs = x.storage(), os = out.storage(), idx, d] {
      if (os->grad.empty()) return;
      Real* gx = ensure_grad(*xs);
      for (std::size_t k = 0; k < idx.size(); ++k)
        for (int j = 0; j < d; ++j)
          gx[static_cast<std::size_t>(idx[k]) * d + j] += os->grad[k * d + j];
    });
  }
  return out;
}

// [T x D] -> [ceil(T/s) x s*D]: consecutive frame groups concatenated; the
// tail group is zero padded.  Used for subsampling ahead of attention blocks.
template <typename Real>
Tensor<Real> group_rows(Tape<Real>* tape, const Tensor<Real>& x, int s) {
  check(x.ndim() == 2, "group_rows: expects 2-D input");
  check(s >= 1, "group_rows: factor must be >= 1");
  const int t = x.dim(0), d = x.dim(1);
  const int out_rows = (t + s - 1) / s;
  Tensor<Real> out({out_rows, s * d});
  for (int i = 0; i < t; ++i) {
    const int g = i / s, slot = i % s;
    std::copy(x.data() + static_cast<std::size_t>(i) * d,
              x.data() + static_cast<std::size_t>(i + 1) * d,
              out.data() + (static_cast<std::size_t>(g) * s + slot) * d);
  }
  if (tape) {
    tape->record([xs = x.storage(), os = out.storage(), t, d, s] {
      if (os->grad.empty()) return;
      Real* gx = ensure_grad(*xs);
      for (int i = 0; i < t; ++i) {
        const int g = i / s, slot = i % s;
        for (int j = 0; j < d; ++j)
          gx[static_cast<std::size_t>(i) * d + j] +=
              os->grad[(static_cast<std::size_t>(g) * s + slot) * d + j];
      }
    });
  }
  return out;
}

// [M x D], [N x D] -> [M*N x D] with row (i*N + j) = a_i + b_j.  Combines
// per-frame and per-label vectors into the joint grid.
template <typename Real>
Tensor<Real> outer_add_rows(Tape<Real>* tape, const Tensor<Real>& a,
                            const Tensor<Real>& b) {
  check(a.ndim() == 2 && b.ndim() == 2 && a.dim(1) == b.dim(1),
        "outer_add_rows: column mismatch");
  const int m = a.dim(0), n = b.dim(0), d = a.dim(1);
  Tensor<Real> out({m * n, d});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      Real* orow = out.data() + (static_cast<std::size_t>(i) * n + j) * d;
      const Real* ar = a.data() + static_cast<std::size_t>(i) * d;
      const Real* br = b.data() + static_cast<std::size_t>(j) * d;
      for (int c = 0; c < d; ++c) orow[c] = ar[c] + br[c];
    }
  if (tape) {
    tape->record([as = a.storage(), bs = b.storage(), os = out.storage(), m, n,
                  d] {
      if (os->grad.empty()) return;
      Real* ga = ensure_grad(*as);
      Real* gb = ensure_grad(*bs);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
          const Real* grow = os->grad.data() + (static_cast<std::size_t>(i) * n + j) * d;
          for (int c = 0; c < d; ++c) {
            ga[static_cast<std::size_t>(i) * d + c] += grow[c];
            gb[static_cast<std::size_t>(j) * d + c] += grow[c];
          }
        }
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> embed_rows(Tape<Real>* tape, const Tensor<Real>& table,
                        const std::vector<int>& ids) {
  check(table.ndim() == 2, "embed_rows: table must be 2-D");
  check(!ids.empty(), "embed_rows: empty id list");
  return select_rows(tape, table, ids);
}

// Same data, new dims; gradients pass through untouched.
template <typename Real>
Tensor<Real> reshape(Tape<Real>* tape, const Tensor<Real>& x,
                     std::vector<int> dims) {
  Tensor<Real> out(std::move(dims));
  check(out.numel() == x.numel(), "reshape: element count mismatch");
  std::copy(x.data(), x.data() + x.numel(), out.data());
  if (tape) {
    tape->record([xs = x.storage(), os = out.storage()] {
      if (os->grad.empty()) return;
      Real* gx = ensure_grad(*xs);
      for (std::size_t i = 0; i < xs->value.size(); ++i) gx[i] += os->grad[i];
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// reductions

template <typename Real>
Tensor<Real> sum_all(Tape<Real>* tape, const Tensor<Real>& x) {
  Tensor<Real> out = Tensor<Real>::scalar(Real(0));
  Real acc = Real(0);
  for (std::size_t i = 0; i < x.numel(); ++i) acc += x.data()[i];
  out.data()[0] = acc;
  if (tape) {
    tape->record([xs = x.storage(), os = out.storage()] {
      if (os->grad.empty()) return;
      Real* gx = ensure_grad(*xs);
      for (std::size_t i = 0; i < xs->value.size(); ++i) gx[i] += os->grad[0];
    });
  }
  return out;
}

template <typename Real>
Tensor<Real> mean_all(Tape<Real>* tape, const Tensor<Real>& x) {
  const Real inv = Real(1) / static_cast<Real>(x.numel());
  Tensor<Real> out = Tensor<Real>::scalar(Real(0));
  Real acc = Real(0);
  for (std::size_t i = 0; i < x.numel(); ++i) acc += x.data()[i];
  out.data()[0] = acc * inv;
  if (tape) {
    tape->record([xs = x.storage(), os = out.storage(), inv] {
      if (os->grad.empty()) return;
      Real* gx = ensure_grad(*xs);
      for (std::size_t i = 0; i < xs->value.size(); ++i) gx[i] += os->grad[0] * inv;
    });
  }
  return out;
}

// Mean absolute error over all elements.
template <typename Real>
Tensor<Real> mean_abs_err(Tape<Real>* tape, const Tensor<Real>& a,
                          const Tensor<Real>& b) {
  check(a.same_dims(b), "mean_abs_err: shape mismatch " + a.shape_string() +
                            " vs " + b.shape_string());
  const std::size_t n = a.numel();
  const Real inv = Real(1) / static_cast<Real>(n);
  Tensor<Real> out = Tensor<Real>::scalar(Real(0));
  Real acc = Real(0);
  for (std::size_t i = 0; i < n; ++i) acc += std::abs(a.data()[i] - b.data()[i]);
  out.data()[0] = acc * inv;
  if (tape) {
    tape->record([as = a.storage(), bs = b.storage(), os = out.storage(), n,
                  inv] {
      if (os->grad.empty()) return;
      Real* ga = ensure_grad(*as);
      Real* gb = ensure_grad(*bs);
      const Real g = os->grad[0] * inv;
      for (std::size_t i = 0; i < n; ++i) {
        const Real diff = as->value[i] - bs->value[i];
        const Real s = diff > Real(0) ? Real(1) : (diff < Real(0) ? Real(-1) : Real(0));
        ga[i] += g * s;
        gb[i] -= g * s;
      }
    });
  }
  return out;
}

}  // namespace ops
}  // namespace cstk
