// cstk/chunking.hpp
//
// Copyright (c)  2026  The cstk authors
//
// Context-sensitive chunking: utterances are tiled into chunk cores; each
// core is spliced with left context (history) and right context (real
// future frames, simulated frames, or nothing) before encoding.
#pragma once

#include <string>
#include <vector>

#include "cstk/common.hpp"
#include "cstk/rng.hpp"
#include "cstk/tensor.hpp"

namespace cstk {

enum class RightContextMode { kNone, kReal, kSimulated };

inline std::string to_string(RightContextMode m) {
  switch (m) {
    case RightContextMode::kNone: return "none";
    case RightContextMode::kReal: return "real";
    case RightContextMode::kSimulated: return "simulated";
  }
  throw UsageError("bad right-context mode");
}

inline RightContextMode right_mode_from_string(const std::string& s) {
  if (s == "none") return RightContextMode::kNone;
  if (s == "real") return RightContextMode::kReal;
  if (s == "simulated") return RightContextMode::kSimulated;
  throw UsageError("unknown right-context mode: " + s);
}

struct ChunkPolicy {
  int chunk_frames = 40;   // C
  int jitter_frames = 20;  // A
  int left_frames = 80;
  int right_frames = 40;   // N_r
  RightContextMode mode = RightContextMode::kSimulated;

  void validate() const {
    if (!(chunk_frames > jitter_frames && jitter_frames >= 0))
      throw UsageError("chunk policy requires C > A >= 0");
    if (left_frames < 0 || right_frames < 0)
      throw UsageError("context sizes must be >= 0");
    if (mode == RightContextMode::kSimulated && right_frames <= 0)
      throw UsageError("simulated right context requires N_r > 0");
  }
};

struct FrameRange {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

// One chunk's core range plus resolved context ranges, all within [0, T).
struct ChunkView {
  FrameRange core;
  FrameRange left;
  FrameRange right;
  bool left_clipped = false;
  bool right_clipped = false;
};

// Training-time chunk size draw: integer uniform on [C - A, C + A].
inline int sample_chunk_size(const ChunkPolicy& policy, Rng& rng) {
  policy.validate();
  if (policy.jitter_frames == 0) return policy.chunk_frames;
  return static_cast<int>(
      rng.uniform_int(policy.chunk_frames - policy.jitter_frames,
                      policy.chunk_frames + policy.jitter_frames));
}

// Nearest positive multiple of `multiple` (ties round up).  Chunk sizes are
// kept aligned to the encoder subsample factor so that per-chunk encoder
// frame counts tile exactly.
inline int align_chunk_size(int size, int multiple) {
  if (multiple <= 1) return size;
  const int down = (size / multiple) * multiple;
  const int up = down + multiple;
  const int aligned = (size - down < up - size) ? down : up;
  return aligned < multiple ? multiple : aligned;
}

inline std::vector<ChunkView> plan_chunks(int total_frames, int chunk_size,
                                          const ChunkPolicy& policy) {
  if (total_frames < 1) throw UsageError("plan_chunks: need T >= 1");
  if (chunk_size < 1) throw UsageError("plan_chunks: need chunk_size >= 1");
  std::vector<ChunkView> views;
  for (int start = 0; start < total_frames; start += chunk_size) {
    ChunkView v;
    v.core.begin = start;
    v.core.end = std::min(total_frames, start + chunk_size);
    v.left.begin = std::max(0, start - policy.left_frames);
    v.left.end = start;
    v.left_clipped = start - policy.left_frames < 0;
    v.right.begin = v.core.end;
    v.right.end = std::min(total_frames, v.core.end + policy.right_frames);
    v.right_clipped = v.core.end + policy.right_frames > total_frames;
    views.push_back(v);
  }
  return views;
}

// Per-chunk encoder input: left context rows, core rows, then right context
// rows.  Row provenance is kept so context rows can be eliminated after
// encoding.
template <typename Real>
struct Splice {
  Tensor<Real> rows;  // [(left+core+right) x D]
  int left_rows = 0;
  int core_rows = 0;
  int right_rows = 0;

  int total_rows() const { return left_rows + core_rows + right_rows; }
  bool is_context_row(int r) const {
    return r < left_rows || r >= left_rows + core_rows;
  }
};

// Assembles the spliced input for one chunk.  `simulated` must be provided
// exactly when mode is kSimulated; real right context clips at the
// utterance boundary while simulated context is always full length.
template <typename Real>
Splice<Real> splice(const Tensor<Real>& features, const ChunkView& view,
                    RightContextMode mode,
                    const Tensor<Real>* simulated = nullptr) {
  if (features.ndim() != 2) throw ShapeError("splice: features must be T x D");
  const int t = features.dim(0), d = features.dim(1);
  if (!(0 <= view.left.begin && view.left.begin <= view.core.begin &&
        view.core.begin < view.core.end && view.core.end <= view.right.end &&
        view.right.end <= t))
    throw UsageError("splice: chunk view out of range for T=" + std::to_string(t));
  if ((mode == RightContextMode::kSimulated) != (simulated != nullptr))
    throw UsageError("splice: simulated frames required iff mode is simulated");

  Splice<Real> out;
  out.left_rows = view.left.size();
  out.core_rows = view.core.size();
  if (mode == RightContextMode::kReal) {
    out.right_rows = view.right.size();
  } else if (mode == RightContextMode::kSimulated) {
    if (simulated->ndim() != 2 || simulated->dim(1) != d)
      throw ShapeError("splice: simulated frames must be N_r x D");
    out.right_rows = simulated->dim(0);
  }

  out.rows = Tensor<Real>({out.total_rows(), d});
  Real* dst = out.rows.data();
  const Real* src = features.data() + static_cast<std::size_t>(view.left.begin) * d;
  const std::size_t real_span =
      static_cast<std::size_t>(out.left_rows + out.core_rows +
                               (mode == RightContextMode::kReal ? out.right_rows : 0)) * d;
  std::copy(src, src + real_span, dst);
  if (mode == RightContextMode::kSimulated)
    std::copy(simulated->data(), simulated->data() + simulated->numel(),
              dst + static_cast<std::size_t>(out.left_rows + out.core_rows) * d);
  return out;
}

}  // namespace cstk
