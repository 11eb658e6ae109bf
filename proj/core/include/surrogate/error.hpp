#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surrogate {

/// Every failure the library reports carries one of these codes.
enum class ErrorCode {
  // schema
  UnknownParameter,
  OutOfBounds,
  MissingParameter,
  UnknownAcp,
  InvalidSchema,
  EmptyMatrix,
  // corpus
  RootNotFound,
  MalformedConfig,
  MalformedAverages,
  ValidationFailed,
  EmptyTable,
  MissingColumn,
  // target
  EmptyValues,
  EmptyDataset,
  InvalidRule,
  // classifiers
  EmptySet,
  EmptyData,
  SingleSample,
  DimensionMismatch,
  SingleClass,
  NoConvergence,
  NewtonDivergence,
  NonFiniteWeights,
  NonFiniteObjective,
  LineSearchFailure,
  InvalidParams,
  // ensemble / eval
  EmptyMembers,
  OutOfRangeProbability,
  DegenerateSplit,
  LengthMismatch,
  // sampler / analyzer / toyabm
  RejectionStall,
  InvalidStats,
  NoPositives,
  EmptyInput,
  SchemaMismatch,
  InvalidVector,
  IoFailure,
  // serialization / cli
  FormatVersion,
  Usage,
};

/// Coarse grouping used for process exit statuses.
enum class ErrorCategory { Usage, Data, Numeric };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 protected:
  struct Verbatim {};
  Error(Verbatim, ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

 private:
  ErrorCode code_;
};

}  // namespace surrogate
