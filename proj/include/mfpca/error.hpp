#pragma once

#include <stdexcept>
#include <string>

namespace mfpca {

enum class ErrorKind {
  kDegenerateGrid,
  kShapeMismatch,
  kDegenerateFeature,
  kAliasing,
  kSparsify,
  kRankDeficient,
  kEmptyObservation,
  kMustDensify,
  kBasisDegeneracy,
  kInvalidArgument,
  kIo,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the bench
// harness in particular) can record it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kDegenerateGrid: return "degenerate grid";
    case ErrorKind::kShapeMismatch: return "shape mismatch";
    case ErrorKind::kDegenerateFeature: return "degenerate feature";
    case ErrorKind::kAliasing: return "aliasing";
    case ErrorKind::kSparsify: return "sparsify";
    case ErrorKind::kRankDeficient: return "rank deficient";
    case ErrorKind::kEmptyObservation: return "empty observation";
    case ErrorKind::kMustDensify: return "must densify";
    case ErrorKind::kBasisDegeneracy: return "basis degeneracy";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace mfpca
