#include "mlid/common/error.hpp"

namespace mlid {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kEmptySupport: return "empty_support";
    case ErrorCode::kSupportCondition: return "support_condition";
    case ErrorCode::kQuadratureBudget: return "quadrature_budget";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kTailModelRejected: return "tail_model_rejected";
    case ErrorCode::kInsufficientDecay: return "insufficient_decay";
    case ErrorCode::kNonTransversal: return "non_transversal";
    case ErrorCode::kSegmentGrowthCap: return "segment_growth_cap";
    case ErrorCode::kNonOrthogonal: return "non_orthogonal";
    case ErrorCode::kInvariantViolation: return "invariant_violation";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

}  // namespace mlid
