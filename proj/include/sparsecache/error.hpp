// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparsecache {

enum class ErrorKind {
  kAllZero,
  kBadLength,
  kLengthMismatch,
  kBadDelta,
  kBadParams,
  kDepthOutOfRange,
  kBudgetTooLarge,
  kBadDecay,
  kNoSamples,
  kBadRange,
  kBadDrift,
  kEmptyTrace,
  kBadInput,
};

std::string_view to_string(ErrorKind kind);

/// Every library failure is reported as an Error carrying a machine-readable
/// kind. Constraint violations (budget too large) are distinguished from
/// malformed input so the CLI can map them to different exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  bool is_constraint() const noexcept {
    return kind_ == ErrorKind::kBudgetTooLarge;
  }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kAllZero: return "AllZero";
    case ErrorKind::kBadLength: return "BadLength";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kBadDelta: return "BadDelta";
    case ErrorKind::kBadParams: return "BadParams";
    case ErrorKind::kDepthOutOfRange: return "DepthOutOfRange";
    case ErrorKind::kBudgetTooLarge: return "BudgetTooLarge";
    case ErrorKind::kBadDecay: return "BadDecay";
    case ErrorKind::kNoSamples: return "NoSamples";
    case ErrorKind::kBadRange: return "BadRange";
    case ErrorKind::kBadDrift: return "BadDrift";
    case ErrorKind::kEmptyTrace: return "EmptyTrace";
    case ErrorKind::kBadInput: return "BadInput";
  }
  return "Unknown";
}

}  // namespace sparsecache
