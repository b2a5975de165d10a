#include "ads/error.hpp"

namespace ads {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kOverlappingGroups: return "OverlappingGroups";
    case ErrorCode::kUncoveredSource: return "UncoveredSource";
    case ErrorCode::kUnknownSource: return "UnknownSource";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kEnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kSourceInSubset: return "SourceInSubset";
    case ErrorCode::kInvalidTolerance: return "InvalidTolerance";
    case ErrorCode::kUnownedSource: return "UnownedSource";
    case ErrorCode::kFractionOutOfRange: return "FractionOutOfRange";
    case ErrorCode::kInvalidScenario: return "InvalidScenario";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace ads
