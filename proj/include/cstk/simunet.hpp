// cstk/simunet.hpp
//
// Copyright (c)  2026  The cstk authors
//
// Future-context simulator: a recurrent stack consumes historical frames
// recursively (chunk core frames, carried across chunks) and one bias-free
// projection emits all N_r simulated future frames in parallel from the
// final hidden state.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cstk/layers.hpp"
#include "cstk/ops.hpp"
#include "cstk/param_store.hpp"

namespace cstk {

struct SimuNetConfig {
  int feature_dim = 16;
  int layers = 2;
  int hidden = 32;
  int right_frames = 4;  // N_r

  void validate() const {
    if (feature_dim < 1 || layers < 1 || hidden < 1 || right_frames < 1)
      throw UsageError("simunet config values must be positive");
  }
};

template <typename Real>
class SimuNet {
 public:
  // One hidden state per recurrent layer; zeros at stream start.
  struct State {
    std::vector<Tensor<Real>> hidden;
  };

  SimuNet() = default;

  SimuNet(const SimuNetConfig& cfg, ParamStore<Real>& ps, Rng& rng) : cfg_(cfg) {
    cfg.validate();
    for (int l = 0; l < cfg.layers; ++l) {
      const int din = l == 0 ? cfg.feature_dim : cfg.hidden;
      cells_.push_back(GatedRecurrentCell<Real>::create(
          ps, "simu.gru" + std::to_string(l), din, cfg.hidden, rng));
    }
    const Real bound = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(cfg.hidden)));
    head_ = ps.create_uniform("simu.head.w",
                              {cfg.hidden, cfg.right_frames * cfg.feature_dim},
                              bound, rng);
  }

  const SimuNetConfig& config() const { return cfg_; }

  State initial_state() const {
    State s;
    for (const auto& c : cells_) s.hidden.push_back(c.zero_state());
    return s;
  }

  // Consumes history frames [M x D], M >= 1, and emits N_r x D simulated
  // future frames plus the advanced state.
  std::pair<Tensor<Real>, State> simulate(Tape<Real>* tape,
                                          const Tensor<Real>& history,
                                          const State& state) const {
    if (history.ndim() != 2 || history.dim(1) != cfg_.feature_dim)
      throw ShapeError("simulate: history must be M x D, got " +
                       history.shape_string());
    if (history.dim(0) < 1) throw ShapeError("simulate: history must be non-empty");
    if (state.hidden.size() != cells_.size())
      throw StateError("simulate: state layer count mismatch");

    State next;
    Tensor<Real> x = history;
    for (std::size_t l = 0; l < cells_.size(); ++l) {
      auto [hs, last] = cells_[l].run(tape, x, state.hidden[l]);
      next.hidden.push_back(last);
      x = hs;
    }
    auto flat = ops::matmul(tape, next.hidden.back(), head_);  // [1 x N_r*D]
    auto frames = ops::reshape(tape, flat, {cfg_.right_frames, cfg_.feature_dim});
    return {frames, next};
  }

 private:
  SimuNetConfig cfg_;
  std::vector<GatedRecurrentCell<Real>> cells_;
  Tensor<Real> head_;
};

// Mean L1 between the simulated frames and the first M real future frames;
// M = 0 (utterance end) contributes zero with zero gradient.
template <typename Real>
Tensor<Real> simulation_loss(Tape<Real>* tape, const Tensor<Real>& simulated,
                             const Tensor<Real>& real_future) {
  if (simulated.ndim() != 2) throw ShapeError("simulation_loss: simulated must be 2-D");
  if (!real_future.defined() || real_future.numel() == 0)
    return Tensor<Real>::scalar(Real(0));
  if (real_future.ndim() != 2 || real_future.dim(1) != simulated.dim(1))
    throw ShapeError("simulation_loss: feature dim mismatch");
  const int m = real_future.dim(0);
  if (m > simulated.dim(0))
    throw UsageError("simulation_loss: more real future frames than simulated");
  auto head = m == simulated.dim(0) ? simulated : ops::slice_rows(tape, simulated, 0, m);
  return ops::mean_abs_err(tape, head, real_future);
}

}  // namespace cstk
