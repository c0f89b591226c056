// cstk/common.hpp
//
// Copyright (c)  2026  The cstk authors
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cstk {

// Error taxonomy maps onto process exit codes: usage = 1, format = 2,
// numeric = 3.  Shape and state errors are usage errors from the caller's
// point of view.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

class ShapeError : public UsageError {
 public:
  explicit ShapeError(const std::string& msg) : UsageError(msg) {}
};

class StateError : public UsageError {
 public:
  explicit StateError(const std::string& msg) : UsageError(msg) {}
};

class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitFormat = 2,
  kExitNumeric = 3,
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
  if (dynamic_cast<const FormatError*>(&e)) return kExitFormat;
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  return kExitUsage;
}

template <typename Real>
inline bool is_finite(Real v) {
  return std::isfinite(static_cast<double>(v));
}

// Frame rate is fixed at 10 ms per frame throughout the toolkit.
inline constexpr int kMsPerFrame = 10;

inline int ms_to_frames(int ms) {
  if (ms < 0) throw UsageError("negative duration: " + std::to_string(ms));
  return (ms + kMsPerFrame - 1) / kMsPerFrame;
}

inline int frames_to_ms(int frames) { return frames * kMsPerFrame; }

}  // namespace cstk
