#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ads {

enum class ErrorCode {
  kEmptyGroup,
  kOverlappingGroups,
  kUncoveredSource,
  kUnknownSource,
  kIndexOutOfRange,
  kEnumerationTooLarge,
  kDimensionMismatch,
  kInvalidLabel,
  kSourceInSubset,
  kInvalidTolerance,
  kUnownedSource,
  kFractionOutOfRange,
  kInvalidScenario,
  kParseError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code and a
/// detail string naming the offending ids.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace ads
