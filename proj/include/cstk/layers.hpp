// cstk/layers.hpp
//
// Copyright (c)  2026  The cstk authors
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cstk/ops.hpp"
#include "cstk/param_store.hpp"
#include "cstk/rng.hpp"

namespace cstk {

template <typename Real>
struct Linear {
  Tensor<Real> w;  // [din x dout]
  Tensor<Real> b;  // [dout], undefined when bias-free

  static Linear create(ParamStore<Real>& ps, const std::string& name, int din,
                       int dout, Rng& rng, bool bias = true) {
    Linear l;
    const Real bound = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(din)));
    l.w = ps.create_uniform(name + ".w", {din, dout}, bound, rng);
    if (bias) l.b = ps.create(name + ".b", {dout});
    return l;
  }

  Tensor<Real> forward(Tape<Real>* tape, const Tensor<Real>& x) const {
    return ops::linear(tape, x, w, b);
  }
};

template <typename Real>
struct LayerNorm {
  Tensor<Real> gain, bias;

  static LayerNorm create(ParamStore<Real>& ps, const std::string& name, int d) {
    LayerNorm ln;
    ln.gain = ps.create(name + ".g", {d});
    for (std::size_t i = 0; i < ln.gain.numel(); ++i) ln.gain.data()[i] = Real(1);
    ln.bias = ps.create(name + ".b", {d});
    return ln;
  }

  Tensor<Real> forward(Tape<Real>* tape, const Tensor<Real>& x) const {
    return ops::layer_norm_rows(tape, x, gain, bias);
  }
};

// Three-gate recurrent cell (update/reset/candidate with sigmoid/tanh).
// A pure function of (params, state, input).
template <typename Real>
struct GatedRecurrentCell {
  int input_dim = 0;
  int hidden_dim = 0;
  Tensor<Real> wxz, whz, bz;
  Tensor<Real> wxr, whr, br;
  Tensor<Real> wxc, whc, bc;

  static GatedRecurrentCell create(ParamStore<Real>& ps, const std::string& name,
                                   int din, int dh, Rng& rng) {
    GatedRecurrentCell c;
    c.input_dim = din;
    c.hidden_dim = dh;
    const Real bx = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(din)));
    const Real bh = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(dh)));
    c.wxz = ps.create_uniform(name + ".wxz", {din, dh}, bx, rng);
    c.whz = ps.create_uniform(name + ".whz", {dh, dh}, bh, rng);
    c.bz = ps.create(name + ".bz", {dh});
    c.wxr = ps.create_uniform(name + ".wxr", {din, dh}, bx, rng);
    c.whr = ps.create_uniform(name + ".whr", {dh, dh}, bh, rng);
    c.br = ps.create(name + ".br", {dh});
    c.wxc = ps.create_uniform(name + ".wxc", {din, dh}, bx, rng);
    c.whc = ps.create_uniform(name + ".whc", {dh, dh}, bh, rng);
    c.bc = ps.create(name + ".bc", {dh});
    return c;
  }

  Tensor<Real> zero_state() const { return Tensor<Real>({1, hidden_dim}); }

  // One step: x [1 x din], h [1 x dh] -> new hidden [1 x dh].
  Tensor<Real> step(Tape<Real>* tape, const Tensor<Real>& x,
                    const Tensor<Real>& h) const {
    if (x.ndim() != 2 || x.dim(0) != 1 || x.dim(1) != input_dim)
      throw ShapeError("recurrent step: bad input shape " + x.shape_string());
    if (h.ndim() != 2 || h.dim(0) != 1 || h.dim(1) != hidden_dim)
      throw ShapeError("recurrent step: bad state shape " + h.shape_string());
    auto z = ops::sigmoid(tape, ops::add(tape, ops::linear(tape, x, wxz, bz),
                                         ops::matmul(tape, h, whz)));
    auto r = ops::sigmoid(tape, ops::add(tape, ops::linear(tape, x, wxr, br),
                                         ops::matmul(tape, h, whr)));
    auto c = ops::tanh_op(
        tape, ops::add(tape, ops::linear(tape, x, wxc, bc),
                       ops::matmul(tape, ops::mul(tape, r, h), whc)));
    // h' = (1 - z) . h + z . c, written as h + z . (c - h)
    return ops::add(tape, h, ops::mul(tape, z, ops::sub(tape, c, h)));
  }

  // Runs a whole sequence, returning all hidden states [T x dh] and the
  // final state.  Input projections are batched across time.
  std::pair<Tensor<Real>, Tensor<Real>> run(Tape<Real>* tape,
                                            const Tensor<Real>& xs,
                                            const Tensor<Real>& h0) const {
    if (xs.ndim() != 2 || xs.dim(1) != input_dim)
      throw ShapeError("recurrent run: bad input shape " + xs.shape_string());
    const int t_len = xs.dim(0);
    auto pz = ops::linear(tape, xs, wxz, bz);
    auto pr = ops::linear(tape, xs, wxr, br);
    auto pc = ops::linear(tape, xs, wxc, bc);
    Tensor<Real> h = h0;
    std::vector<Tensor<Real>> hs;
    hs.reserve(static_cast<std::size_t>(t_len));
    for (int t = 0; t < t_len; ++t) {
      auto z = ops::sigmoid(tape, ops::add(tape, ops::slice_rows(tape, pz, t, t + 1),
                                           ops::matmul(tape, h, whz)));
      auto r = ops::sigmoid(tape, ops::add(tape, ops::slice_rows(tape, pr, t, t + 1),
                                           ops::matmul(tape, h, whr)));
      auto c = ops::tanh_op(
          tape, ops::add(tape, ops::slice_rows(tape, pc, t, t + 1),
                         ops::matmul(tape, ops::mul(tape, r, h), whc)));
      h = ops::add(tape, h, ops::mul(tape, z, ops::sub(tape, c, h)));
      hs.push_back(h);
    }
    return {ops::concat_rows(tape, hs), h};
  }
};

// Pre-norm self-attention block: x + MHA(LN(x)), then x + FFN(LN(x)).
template <typename Real>
struct AttentionBlock {
  int model_dim = 0;
  int num_heads = 0;
  LayerNorm<Real> ln_attn, ln_ffn;
  Linear<Real> wq, wk, wv, wo;
  Linear<Real> ffn1, ffn2;

  static AttentionBlock create(ParamStore<Real>& ps, const std::string& name,
                               int dim, int heads, int ffn_dim, Rng& rng) {
    if (dim % heads != 0)
      throw UsageError("attention dim must be divisible by head count");
    AttentionBlock b;
    b.model_dim = dim;
    b.num_heads = heads;
    b.ln_attn = LayerNorm<Real>::create(ps, name + ".ln_attn", dim);
    b.wq = Linear<Real>::create(ps, name + ".wq", dim, dim, rng);
    b.wk = Linear<Real>::create(ps, name + ".wk", dim, dim, rng);
    b.wv = Linear<Real>::create(ps, name + ".wv", dim, dim, rng);
    b.wo = Linear<Real>::create(ps, name + ".wo", dim, dim, rng);
    b.ln_ffn = LayerNorm<Real>::create(ps, name + ".ln_ffn", dim);
    b.ffn1 = Linear<Real>::create(ps, name + ".ffn1", dim, ffn_dim, rng);
    b.ffn2 = Linear<Real>::create(ps, name + ".ffn2", ffn_dim, dim, rng);
    return b;
  }

  Tensor<Real> forward(Tape<Real>* tape, const Tensor<Real>& x) const {
    if (x.ndim() != 2 || x.dim(1) != model_dim)
      throw ShapeError("attention block: bad input shape " + x.shape_string());
    const int dh = model_dim / num_heads;
    const Real inv_sqrt = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(dh)));

    auto xn = ln_attn.forward(tape, x);
    auto q = wq.forward(tape, xn);
    auto k = wk.forward(tape, xn);
    auto v = wv.forward(tape, xn);
    std::vector<Tensor<Real>> head_outs;
    head_outs.reserve(static_cast<std::size_t>(num_heads));
    for (int h = 0; h < num_heads; ++h) {
      auto qh = ops::slice_cols(tape, q, h * dh, (h + 1) * dh);
      auto kh = ops::slice_cols(tape, k, h * dh, (h + 1) * dh);
      auto vh = ops::slice_cols(tape, v, h * dh, (h + 1) * dh);
      auto scores = ops::scale(tape, ops::matmul_nt(tape, qh, kh), inv_sqrt);
      auto attn = ops::softmax_rows(tape, scores);
      head_outs.push_back(ops::matmul(tape, attn, vh));
    }
    auto mha = wo.forward(tape, ops::concat_cols(tape, head_outs));
    auto a = ops::add(tape, x, mha);

    auto an = ln_ffn.forward(tape, a);
    auto ff = ffn2.forward(tape, ops::relu(tape, ffn1.forward(tape, an)));
    return ops::add(tape, a, ff);
  }
};

// Sinusoidal position features for positions [0, n); plain constants.
template <typename Real>
Tensor<Real> sinusoidal_positions(int n, int dim) {
  Tensor<Real> pe({n, dim});
  for (int pos = 0; pos < n; ++pos)
    for (int j = 0; j < dim; ++j) {
      const double rate = std::pow(10000.0, -2.0 * (j / 2) / dim);
      const double arg = pos * rate;
      pe.data()[static_cast<std::size_t>(pos) * dim + j] =
          static_cast<Real>((j % 2 == 0) ? std::sin(arg) : std::cos(arg));
    }
  return pe;
}

}  // namespace cstk
