// cstk/tensor.hpp
//
// Copyright (c)  2026  The cstk authors
#pragma once

#include <cstddef>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cstk/common.hpp"

namespace cstk {

template <typename Real>
struct TensorStorage {
  std::vector<int> dims;
  std::vector<Real> value;
  std::vector<Real> grad;  // empty until gradient first flows here
};

// Dense row-major tensor with an optional paired gradient buffer.  Copies
// share storage; a tensor written by a forward op is treated as immutable
// afterwards.
template <typename Real>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> dims, Real fill = Real(0)) {
    std::size_t n = check_dims(dims);
    s_ = std::make_shared<TensorStorage<Real>>();
    s_->dims = std::move(dims);
    s_->value.assign(n, fill);
  }

  static Tensor scalar(Real v) {
    Tensor t(std::vector<int>{1});
    t.data()[0] = v;
    return t;
  }

  static Tensor from_rows(const std::vector<std::vector<Real>>& rows) {
    if (rows.empty()) throw ShapeError("from_rows: no rows");
    const int c = static_cast<int>(rows[0].size());
    Tensor t({static_cast<int>(rows.size()), c});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<int>(rows[i].size()) != c)
        throw ShapeError("from_rows: ragged rows");
      for (int j = 0; j < c; ++j) t.data()[i * c + j] = rows[i][j];
    }
    return t;
  }

  bool defined() const { return s_ != nullptr; }

  int ndim() const { return static_cast<int>(s_->dims.size()); }
  int dim(int i) const { return s_->dims.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& dims() const { return s_->dims; }
  std::size_t numel() const { return s_->value.size(); }

  int rows() const {
    if (ndim() == 1) return 1;
    require(ndim() == 2, "rows(): tensor is not 2-D");
    return dim(0);
  }
  int cols() const {
    if (ndim() == 1) return dim(0);
    require(ndim() == 2, "cols(): tensor is not 2-D");
    return dim(1);
  }

  Real* data() { return s_->value.data(); }
  const Real* data() const { return s_->value.data(); }
  Real item() const {
    require(numel() == 1, "item(): tensor is not a scalar");
    return s_->value[0];
  }

  Real at(int r, int c) const { return s_->value[idx(r, c)]; }
  Real& at(int r, int c) { return s_->value[idx(r, c)]; }

  bool has_grad() const { return !s_->grad.empty(); }
  // Allocates the gradient buffer (zeros) on first use.
  Real* grad() {
    if (s_->grad.empty()) s_->grad.assign(s_->value.size(), Real(0));
    return s_->grad.data();
  }
  const std::vector<Real>& grad_vector() const { return s_->grad; }
  void zero_grad() {
    if (!s_->grad.empty()) s_->grad.assign(s_->value.size(), Real(0));
  }

  std::shared_ptr<TensorStorage<Real>> storage() const { return s_; }

  bool all_finite() const {
    for (Real v : s_->value)
      if (!is_finite(v)) return false;
    return true;
  }

  void require_finite(const char* what) const {
    if (!all_finite()) throw NumericError(std::string(what) + ": non-finite value");
  }

  bool same_dims(const Tensor& o) const { return s_->dims == o.s_->dims; }

  std::string shape_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < s_->dims.size(); ++i) {
      if (i) os << "x";
      os << s_->dims[i];
    }
    os << "]";
    return os.str();
  }

  template <typename Other>
  Tensor<Other> cast() const {
    Tensor<Other> out(s_->dims);
    for (std::size_t i = 0; i < numel(); ++i)
      out.data()[i] = static_cast<Other>(s_->value[i]);
    return out;
  }

 private:
  static std::size_t check_dims(const std::vector<int>& dims) {
    if (dims.empty()) throw ShapeError("tensor must have at least one dim");
    std::size_t n = 1;
    for (int d : dims) {
      if (d <= 0) throw ShapeError("tensor dims must be positive");
      n *= static_cast<std::size_t>(d);
    }
    return n;
  }
  std::size_t idx(int r, int c) const {
    require(ndim() == 2, "2-D index on non-matrix");
    require(r >= 0 && r < dim(0) && c >= 0 && c < dim(1), "index out of range");
    return static_cast<std::size_t>(r) * dim(1) + c;
  }
  static void require(bool ok, const char* msg) {
    if (!ok) throw ShapeError(msg);
  }

  std::shared_ptr<TensorStorage<Real>> s_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace cstk
