#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dp/aggregation.hpp"
#include "dp/covering.hpp"
#include "dp/formulation.hpp"
#include "dp/relation.hpp"

namespace dp {

struct CaseReport {
  std::string name;
  /// Dimension name -> rendered order, in dimension order.
  std::vector<std::pair<std::string, std::string>> orders;
  std::optional<Partition> aggregate;
  /// Named pass/fail checks against the expected outcome.
  std::vector<std::pair<std::string, bool>> checks;
  /// Human-readable summary, one line each.
  std::vector<std::string> lines;

  bool ok() const;
  std::string text() const;
};

// Facility covering

struct CoveringCase {
  CoveringInstance instance;
  ProblemFormulation formulation;
  /// One two-class rating problem per district.
  std::size_t rating_phases = 0;
};

/// Binary opening variables x1..xn, one coverage attribute per district and
/// the openings attribute o (fewer is better) ranked into two classes. The
/// max_cover variant adds y1..yn and the coverage count c.
/// Throws InvalidFixture.
CoveringCase build_covering_case(const CoveringInstance& instance);

/// Solves with `algorithm`; small instances are also ranked through the
/// generic enumerate -> evaluate -> rank pipeline and cross-checked.
CaseReport run_covering_case(const CoveringCase& c, CoverAlgorithm algorithm = CoverAlgorithm::exact);

/// Size of the variables space up to which the generic pipeline is run.
inline constexpr std::size_t kPipelineCap = 4096;

// Alice

/// Descriptive only; the orders below are ordinal.
struct AliceParams {
  double acceptance_rate = 0.2;  // r
  double reward = 1000;          // R
  double ticket_now = 400;       // t
  double ticket_late = 900;      // T
  double booking_fee = 50;       // q
  double budget = 800;           // K
  double shortfall = 0.3;        // p
};

struct AliceCase {
  AliceParams params;
  bool include_sw = false;
  std::vector<std::string> actions;
  /// Scenario dimension names.
  std::vector<std::string> scenarios;
  ProblemFormulation formulation;
  /// Scenario -> expected order, best first.
  std::map<std::string, std::vector<std::string>> expected;
};

AliceCase build_alice_case(const AliceParams& params = {}, bool include_sw = false);

/// Lexicographic, the not-accepted scenario first.
Aggregator alice_default_aggregator();

CaseReport run_alice_case(const AliceCase& c, const Aggregator& aggregator = alice_default_aggregator());

}  // namespace dp
