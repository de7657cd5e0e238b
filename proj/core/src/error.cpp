#include "qtur/error.hpp"

namespace qtur {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kSingularOperator: return "SingularOperator";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kInvalidState: return "InvalidState";
    case ErrorCode::kDegeneratePair: return "DegeneratePair";
    case ErrorCode::kDetailedBalanceViolated: return "DetailedBalanceViolated";
    case ErrorCode::kSingularState: return "SingularState";
    case ErrorCode::kImaginaryResidue: return "ImaginaryResidue";
    case ErrorCode::kZeroFluctuationWithCurrent: return "ZeroFluctuationWithCurrent";
    case ErrorCode::kBasisMismatch: return "BasisMismatch";
    case ErrorCode::kInsufficientPoints: return "InsufficientPoints";
    case ErrorCode::kCommutationViolated: return "CommutationViolated";
    case ErrorCode::kIrreversibleRate: return "IrreversibleRate";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace qtur
