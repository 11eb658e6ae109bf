#include "surrogate/error.hpp"

namespace surrogate {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::MissingParameter: return "MissingParameter";
    case ErrorCode::UnknownAcp: return "UnknownAcp";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::RootNotFound: return "RootNotFound";
    case ErrorCode::MalformedConfig: return "MalformedConfig";
    case ErrorCode::MalformedAverages: return "MalformedAverages";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyValues: return "EmptyValues";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidRule: return "InvalidRule";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::SingleSample: return "SingleSample";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::NonFiniteWeights: return "NonFiniteWeights";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::LineSearchFailure: return "LineSearchFailure";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::EmptyMembers: return "EmptyMembers";
    case ErrorCode::OutOfRangeProbability: return "OutOfRangeProbability";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::RejectionStall: return "RejectionStall";
    case ErrorCode::InvalidStats: return "InvalidStats";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvalidVector: return "InvalidVector";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::FormatVersion: return "FormatVersion";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Usage:
    case ErrorCode::InvalidParams:
      return ErrorCategory::Usage;
    case ErrorCode::NoConvergence:
    case ErrorCode::NewtonDivergence:
    case ErrorCode::NonFiniteWeights:
    case ErrorCode::NonFiniteObjective:
    case ErrorCode::LineSearchFailure:
    case ErrorCode::RejectionStall:
      return ErrorCategory::Numeric;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace surrogate
