// cstk/tape.hpp
//
// Copyright (c)  2026  The cstk authors
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "cstk/common.hpp"
#include "cstk/tensor.hpp"

namespace cstk {

// Records the forward computation as a list of backward closures and replays
// them in reverse.  A null Tape* passed to an op means "inference, do not
// record".  Gradients accumulate (+=) so several losses recorded on one tape
// can share a single backward pass.
template <typename Real>
class Tape {
 public:
  void record(std::function<void()> back_fn) {
    steps_.push_back(std::move(back_fn));
  }

  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }

  void backward(Tensor<Real>& loss) {
    if (steps_.empty())
      throw StateError("backward called without a recorded forward pass");
    if (loss.numel() != 1)
      throw ShapeError("backward expects a scalar loss, got " +
                       loss.shape_string());
    loss.grad()[0] += Real(1);
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
    steps_.clear();
  }

  void clear() { steps_.clear(); }

 private:
  std::vector<std::function<void()>> steps_;
};

using TapeF = Tape<float>;
using TapeD = Tape<double>;

}  // namespace cstk
