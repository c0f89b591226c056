// cstk/cer.hpp
//
// Copyright (c)  2026  The cstk authors
#pragma once

#include <algorithm>
#include <vector>

#include "cstk/common.hpp"
#include "cstk/vocab.hpp"

namespace cstk {

// Levenshtein distance with unit costs for substitution/insertion/deletion.
inline int edit_distance(const LabelSequence& a, const LabelSequence& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// Label error rate: edit distance normalized by reference length.
inline double cer(const LabelSequence& reference, const LabelSequence& hypothesis) {
  if (reference.empty())
    throw UsageError("cer: reference must be non-empty");
  return static_cast<double>(edit_distance(reference, hypothesis)) /
         static_cast<double>(reference.size());
}

// Corpus-level aggregation: total edits / total reference length.
struct CerAccumulator {
  long long edits = 0;
  long long ref_len = 0;

  void add(const LabelSequence& reference, const LabelSequence& hypothesis) {
    if (reference.empty())
      throw UsageError("cer: reference must be non-empty");
    edits += edit_distance(reference, hypothesis);
    ref_len += static_cast<long long>(reference.size());
  }

  double value() const {
    if (ref_len == 0) throw UsageError("cer: no references accumulated");
    return static_cast<double>(edits) / static_cast<double>(ref_len);
  }
};

}  // namespace cstk
