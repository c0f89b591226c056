// cstk/features.hpp
//
// Copyright (c)  2026  The cstk authors
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "cstk/common.hpp"
#include "cstk/param_store.hpp"
#include "cstk/tensor.hpp"

namespace cstk {

// T x D matrix of acoustic-style frames at a 10 ms hop.
struct FeatureSequence {
  Tensor<float> frames;  // [T x D]
  int hop_ms = kMsPerFrame;

  int num_frames() const { return frames.dim(0); }
  int dim() const { return frames.dim(1); }

  void validate() const {
    if (!frames.defined() || frames.ndim() != 2)
      throw ShapeError("feature sequence must be a T x D matrix");
    if (frames.dim(0) < 1 || frames.dim(1) < 1)
      throw ShapeError("feature sequence needs T >= 1, D >= 1");
    frames.require_finite("feature sequence");
  }
};

// FEAT binary layout: magic "FEAT", u32 T, u32 D, T*D little-endian f32
// row-major.  Readers reject bad magic, truncation, dim overflow, and
// trailing bytes.
inline void write_features(std::ostream& os, const FeatureSequence& fs) {
  fs.validate();
  os.write("FEAT", 4);
  io::write_u32(os, static_cast<std::uint32_t>(fs.num_frames()));
  io::write_u32(os, static_cast<std::uint32_t>(fs.dim()));
  for (std::size_t i = 0; i < fs.frames.numel(); ++i)
    io::write_f32(os, fs.frames.data()[i]);
  if (!os) throw FormatError("feature write failed");
}

inline void write_features(const std::string& path, const FeatureSequence& fs) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open feature file for writing: " + path);
  write_features(os, fs);
}

inline FeatureSequence read_features(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4)) throw FormatError("feature file truncated in magic");
  if (std::memcmp(magic, "FEAT", 4) != 0)
    throw FormatError("bad feature file magic");
  std::uint32_t t = 0, d = 0;
  if (!io::read_u32(is, &t) || !io::read_u32(is, &d))
    throw FormatError("feature file truncated in header");
  if (t == 0 || d == 0) throw FormatError("feature dims must be positive");
  const std::uint64_t numel = static_cast<std::uint64_t>(t) * d;
  if (numel > (1ull << 31)) throw FormatError("feature dims overflow");
  FeatureSequence fs;
  fs.frames = Tensor<float>({static_cast<int>(t), static_cast<int>(d)});
  for (std::uint64_t i = 0; i < numel; ++i)
    if (!io::read_f32(is, &fs.frames.data()[i]))
      throw FormatError("feature payload truncated");
  is.peek();
  if (!is.eof()) throw FormatError("trailing bytes after feature payload");
  return fs;
}

inline FeatureSequence read_features(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open feature file: " + path);
  return read_features(is);
}

}  // namespace cstk
