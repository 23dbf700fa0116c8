#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ngrem {

enum class ErrorCode {
  // model validation
  NonPositiveWeight,
  NormalizationOutOfTolerance,
  EmptySubsetWeight,
  IndexOutOfRange,
  DuplicateSubset,
  UnsortedIndices,
  UncoveredGroup,
  TooManyGroups,
  ParseError,
  // lattice / chain
  NotStrictSuperset,
  InvalidChain,
  // capacity
  CapExceeded,
  BudgetExceeded,
  GroupTooSmall,
  // everything else a caller can get wrong
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::NormalizationOutOfTolerance: return "NormalizationOutOfTolerance";
    case ErrorCode::EmptySubsetWeight: return "EmptySubsetWeight";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DuplicateSubset: return "DuplicateSubset";
    case ErrorCode::UnsortedIndices: return "UnsortedIndices";
    case ErrorCode::UncoveredGroup: return "UncoveredGroup";
    case ErrorCode::TooManyGroups: return "TooManyGroups";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotStrictSuperset: return "NotStrictSuperset";
    case ErrorCode::InvalidChain: return "InvalidChain";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

// Errors that make a model file or model candidate unusable.
constexpr bool is_model_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveWeight:
    case ErrorCode::NormalizationOutOfTolerance:
    case ErrorCode::EmptySubsetWeight:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::DuplicateSubset:
    case ErrorCode::UnsortedIndices:
    case ErrorCode::UncoveredGroup:
    case ErrorCode::TooManyGroups:
    case ErrorCode::ParseError:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ngrem
