#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlid {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kEmptySupport,
  kSupportCondition,
  kQuadratureBudget,
  kNonFinite,
  kTailModelRejected,
  kInsufficientDecay,
  kNonTransversal,
  kSegmentGrowthCap,
  kNonOrthogonal,
  kInvariantViolation,
  kConfig,
};

std::string_view to_string(ErrorCode code);

// Structured error raised by every module. The code is stable and is what
// callers (and the CLI exit-code mapping) branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace mlid
