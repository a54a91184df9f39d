#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dp/formulation.hpp"
#include "dp/oracle.hpp"
#include "dp/relation.hpp"

namespace dp {

enum class SessionStatus { running, satisfied, exhausted };

std::string_view to_string(SessionStatus s);

struct ProcessConfig {
  std::size_t max_iter = 50;
  /// Majority threshold combining the per-attribute relations; never below a
  /// strict majority.
  double threshold = 0.5;
  std::size_t exact_cap = kDefaultExactCap;
  std::uint64_t seed = 1;

  bool operator==(const ProcessConfig&) const = default;
};

struct HistoryEntry {
  std::size_t iteration = 0;
  std::vector<std::string> alternatives;
  Partition partition;
  /// The satisfaction answer closing the iteration, normalised.
  Json answer;

  bool operator==(const HistoryEntry&) const = default;
};

/// Pairwise answers: "left", "right", "indifferent" or "incomparable".
using PairwiseAnswers = std::map<std::string, std::map<std::string, std::string>>;

struct Session {
  std::string id;
  /// Incumbent A_i, always as explicit members.
  AlternativeSet alternatives;
  /// Incumbent D_i.
  std::vector<Attribute> attributes;
  ProblemStatement statement;
  ProcessConfig config;
  SessionStatus status = SessionStatus::running;
  std::vector<HistoryEntry> history;
  std::deque<OracleQuery> pending;
  std::optional<Partition> partition;
  /// attribute -> "x|y" -> answer, for attributes without an evaluator.
  PairwiseAnswers pairwise;
  /// lineage[k]: alternative of iteration k+2 -> the iteration k+1
  /// alternative it was built from.
  std::vector<std::map<std::string, std::string>> lineage;
  std::vector<std::pair<std::string, Json>> transcript;
  std::vector<std::string> log;
  /// Extension collected between a negative satisfaction answer and the
  /// last proposal answer.
  std::optional<std::vector<std::size_t>> kept_classes;
  std::vector<Attribute> staged_attributes;
  std::vector<Variable> staged_variables;

  std::size_t iteration() const noexcept { return history.size() + 1; }
};

/// A_0 is a single variable named after the seed with the seed's labels as
/// domain; each label is one alternative. Throws NoDecisionProblem for a
/// non-separable seed and NotEnumerable for a numeric codomain.
Session init_session(const Attribute& seed, const ProblemStatement& statement, const ProcessConfig& config = {},
                     std::string id = "s1");

/// Consumes the answer to the head of the pending queue. Throws
/// ProtocolViolation when `key` is not the head or the answer has the wrong
/// shape; the session is left unchanged in that case.
///
/// Answers:
///   pairwise@<attr>:<x>|<y>   "left" | "right" | "indifferent" | "incomparable"
///   satisfaction@<i>          true | false | {"satisfied", "kept_classes", "request"}
///   propose_attribute@<i>     null | attribute object
///   propose_variable@<i>      null | variable object (finite domain)
void apply_step(Session& s, const std::string& key, const Json& answer);

/// Drives the session with `oracle` until it stops running. Answers are
/// applied one at a time, so an oracle that runs dry (IncompleteElicitation)
/// leaves a resumable session. max_iter overrides the session's cap.
Partition run_process(Session& s, Oracle& oracle, std::optional<std::size_t> max_iter = std::nullopt);

/// Partition of the incumbent alternatives under the current attributes.
Partition partition_incumbent(const Session& s);

/// Every alternative of each iteration descends from a kept class of the
/// previous iteration's partition.
bool lineage_consistent(const Session& s);

Json session_to_json(const Session& s);
Session session_from_json(const Json& j);

}  // namespace dp
