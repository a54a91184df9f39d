#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dp {

enum class ErrorCode {
  MalformedRelation,
  CapExceeded,
  CyclicStrictPart,
  NoDecisionProblem,
  MissingNorms,
  NotEnumerable,
  EvaluationFailure,
  NoDecomposition,
  NotAggregable,
  UnknownReference,
  InconsistentStatements,
  DependentDimensions,
  IntransitiveSwaps,
  IncompleteElicitation,
  Inconclusive,
  NoAdmissibleArchetype,
  CarrierMismatch,
  NotCommensurable,
  NotTotalImportance,
  NotRepresentable,
  UnconfiguredNode,
  MalformedNorms,
  AmbiguousAssignment,
  BadK,
  Infeasible,
  InvalidFixture,
  ProtocolViolation,
  UnsupportedVersion,
  ParseError,
  StartupError,
  UnsupportedStatement,
  MalformedPartition,
  InvalidFormulation,
};

std::string_view code_name(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI, service, Python) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dp
