#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qtur {

enum class ErrorCode {
  kInvalidArgument,
  kDimMismatch,
  kNotHermitian,
  kSingularOperator,
  kNonConvergence,
  kInvalidState,
  kDegeneratePair,
  kDetailedBalanceViolated,
  kSingularState,
  kImaginaryResidue,
  kZeroFluctuationWithCurrent,
  kBasisMismatch,
  kInsufficientPoints,
  kCommutationViolated,
  kIrreversibleRate,
  kParse,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qtur
