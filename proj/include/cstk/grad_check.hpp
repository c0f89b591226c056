// cstk/grad_check.hpp
//
// Copyright (c)  2026  The cstk authors
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "cstk/param_store.hpp"
#include "cstk/rng.hpp"
#include "cstk/tape.hpp"

namespace cstk {

struct GradCheckReport {
  double max_rel_error = 0.0;
  bool deterministic = true;
  std::size_t coords_checked = 0;

  bool passed(double tol) const { return deterministic && max_rel_error < tol; }
};

// Compares analytic gradients against central finite differences.  The loss
// closure must rebuild its forward pass from scratch on every call;
// non-determinism is detected and reported as a failure.
template <typename Real>
GradCheckReport grad_check(const std::function<Tensor<Real>(Tape<Real>*)>& loss_fn,
                           ParamStore<Real>& params, Real epsilon,
                           int samples_per_tensor, Rng& rng) {
  GradCheckReport report;

  const Real probe1 = loss_fn(nullptr).item();
  const Real probe2 = loss_fn(nullptr).item();
  if (probe1 != probe2) {
    report.deterministic = false;
    report.max_rel_error = std::numeric_limits<double>::infinity();
    return report;
  }

  params.zero_grads();
  Tape<Real> tape;
  Tensor<Real> loss = loss_fn(&tape);
  tape.backward(loss);

  for (std::size_t ti = 0; ti < params.size(); ++ti) {
    Tensor<Real>& t = params.tensor(ti);
    const std::size_t n = t.numel();
    std::vector<std::size_t> coords;
    if (static_cast<std::size_t>(samples_per_tensor) >= n) {
      coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      for (int s = 0; s < samples_per_tensor; ++s)
        coords.push_back(static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(n) - 1)));
    }
    for (std::size_t c : coords) {
      const Real saved = t.data()[c];
      t.data()[c] = saved + epsilon;
      const double f_plus = static_cast<double>(loss_fn(nullptr).item());
      t.data()[c] = saved - epsilon;
      const double f_minus = static_cast<double>(loss_fn(nullptr).item());
      t.data()[c] = saved;
      const double numeric = (f_plus - f_minus) / (2.0 * static_cast<double>(epsilon));
      const double analytic = static_cast<double>(t.grad()[c]);
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      report.max_rel_error =
          std::max(report.max_rel_error, std::abs(analytic - numeric) / denom);
      ++report.coords_checked;
    }
  }
  return report;
}

}  // namespace cstk
