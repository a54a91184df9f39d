#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dp/formulation.hpp"
#include "dp/oracle.hpp"
#include "dp/relation.hpp"

namespace dp {

enum class PreferenceKind {
  first_order_relative,
  first_order_absolute,
  extended,
  intensity,
  multi_attribute,
  second_order,
};

enum class Polarity { positive, explicit_negative };

/// How the left operand relates to the right one.
enum class Comparator { weak, strict, indifferent };

/// One structured client utterance. Operands are tokens resolved against the
/// carrier, the norm ids and the attribute names.
///
///   relative / multi_attribute: lhs = {x}, rhs = {y}
///   absolute:                   lhs = {x}, rhs = {norm}
///   extended:                   lhs = X,   rhs = Y (element sets)
///   intensity:                  lhs = {x, y}, rhs = {z, w}; "x over y beats z over w"
///   second_order:               lhs = H,   rhs = G (attribute subsets)
struct PreferenceStatement {
  std::vector<std::string> lhs;
  std::vector<std::string> rhs;
  std::vector<std::string> scope;
  Comparator comparator = Comparator::weak;
  Polarity polarity = Polarity::positive;
  bool intensity = false;
  /// Declared kind; classification checks it when present.
  std::optional<PreferenceKind> kind;

  bool operator==(const PreferenceStatement&) const = default;
};

std::string_view to_string(PreferenceKind k);

/// Names the carrier, norms and attributes statements may mention.
struct StatementContext {
  std::set<std::string> elements;
  std::set<std::string> norms;
  std::set<std::string> attributes;
};

StatementContext make_context(std::span<const ElementId> carrier, const ProblemFormulation& f);

/// Throws UnknownReference when an operand resolves to nothing, and
/// UnsupportedStatement when arities fit no kind.
PreferenceKind classify_preference_statement(const PreferenceStatement& s, const StatementContext& ctx);

/// Sorted attribute names joined by '+'.
std::string scope_key(std::span<const std::string> attributes);

enum class IndependenceVerdict { independent, dependent, inconclusive };
enum class SeparabilityVerdict { separable, not_separable, inconclusive };

enum class Importance { h_over_g, g_over_h, incomparable };

struct ImportanceVerdict {
  std::vector<std::string> h;
  std::vector<std::string> g;
  Importance verdict = Importance::incomparable;
  /// (x, y) with x at least as good on H, y strictly better on G, and x
  /// strictly better overall.
  std::optional<ElementPair> witness;
  /// Same condition with H and G swapped.
  std::optional<ElementPair> reverse_witness;
  IndependenceVerdict independence = IndependenceVerdict::inconclusive;
};

/// Interval-scale function on an attribute's codomain, piecewise linear
/// between the elicited points.
struct ValueFunction {
  std::string attribute;
  std::vector<double> points;
  std::vector<double> values;

  double operator()(double u) const;
  bool operator==(const ValueFunction&) const = default;
};

struct PrimitiveBase {
  std::vector<ElementId> carrier;
  /// Single-attribute weak relations, reflexive closed.
  std::map<std::string, Relation> per_dimension;
  /// Relations over attribute subsets of size >= 2, keyed by scope_key.
  std::map<std::string, Relation> multi_attribute;
  /// Absolute relations per attribute: carrier against norm ids.
  std::map<std::string, Relation> norms;
  std::vector<std::string> norm_ids;
  /// Extended statements kept as given (sets are not carrier elements).
  std::vector<PreferenceStatement> extended;
  /// Explicitly denied pairs per scope key. Never inferred as complements.
  std::map<std::string, std::set<ElementPair>> negatives;
  /// Second-order and intensity statements, kept as consistency constraints.
  std::vector<PreferenceStatement> parked;
  /// Attribute levels of the carrier, used by observational checks.
  std::optional<PerformanceTable> performances;
  /// Results of derive_importance; never fed from raw statements.
  std::vector<ImportanceVerdict> derived_importance;
  std::map<std::string, ValueFunction> derived_values;

  /// Relation on an attribute subset, or nullptr.
  const Relation* relation_on(std::span<const std::string> attributes) const;
};

struct Rejection {
  std::size_t index = 0;
  PreferenceKind kind{};
  std::string reason;
};

struct CompiledBase {
  PrimitiveBase base;
  std::vector<Rejection> rejections;
};

/// Throws InconsistentStatements when a statement asserts a pair that an
/// explicit negative denies (in either arrival order), or when strict
/// statements contradict each other.
CompiledBase compile_primitive_base(std::span<const PreferenceStatement> statements, const ProblemFormulation& f,
                                    std::vector<ElementId> carrier);

/// Two observations at different G levels that disagree about the same H
/// levels: (x, y) seen under one level, (z, w) under another.
struct Counterexample {
  ElementPair first;
  ElementPair second;
};

struct IndependenceReport {
  IndependenceVerdict verdict = IndependenceVerdict::inconclusive;
  std::optional<Counterexample> counterexample;
  /// Distinct H-level comparisons observed under two or more G levels.
  std::size_t compared = 0;
};

/// Preferences over H are independent of G when the comparison of any two
/// H-level vectors reads the same under every observed G level. Uses the
/// relation on H and G together and the performance table of the base.
IndependenceReport check_preferential_independence(const PrimitiveBase& base, std::span<const std::string> h,
                                                   std::span<const std::string> g);

/// Throws DependentDimensions with the counterexample when independence fails,
/// and UnknownReference when a needed relation is missing.
ImportanceVerdict derive_importance(const PrimitiveBase& base, std::span<const std::string> h,
                                    std::span<const std::string> g);

struct ConsistencyCheck {
  PreferenceStatement statement;
  bool consistent = false;
  std::string detail;
};

/// Checks every parked second-order statement against a derived verdict.
std::vector<ConsistencyCheck> check_parked_importance(const PrimitiveBase& base);

enum class SwapAnswer { less, indifferent, more };

/// "Is moving `attribute` from `from` to `to` worth less than, as much as, or
/// more than moving `ref_attribute` from `ref_from` to `ref_to`?"
struct SwapQuestion {
  std::string attribute;
  double from = 0;
  double to = 0;
  std::string ref_attribute;
  double ref_from = 0;
  double ref_to = 0;

  OracleQuery query() const;
};

SwapAnswer parse_swap_answer(const Json& answer);
Json swap_answer_json(SwapAnswer a);

struct ValueFunctionOptions {
  std::size_t grid = 9;
  double tolerance = 1e-9;
  /// Defaults to the attribute itself.
  std::optional<Attribute> reference;
};

/// Builds a standard sequence of equally valued steps by indifference swaps:
/// the first step fixes the unit, each next point is found by bisection, and
/// an outer bisection on the unit makes the last point land on the best end
/// of the codomain. Values run 0 .. grid-1 from the worst end.
///
/// Throws IntransitiveSwaps when answers contradict each other,
/// IncompleteElicitation when a scripted oracle runs dry and NotRepresentable
/// for label or nominal codomains.
ValueFunction derive_value_function(const PrimitiveBase& base, const Attribute& attr, Oracle& oracle,
                                    const ValueFunctionOptions& options = {});

/// Every consecutive step against the first one, and every two-step swap
/// against one step, must get the answer the function's values predict.
bool check_swap_consistency(const ValueFunction& fn, Oracle& oracle, double tolerance = 1e-6);

struct SeparabilityReport {
  SeparabilityVerdict verdict = SeparabilityVerdict::inconclusive;
  std::optional<ElementPair> witness;
  /// Ceteris paribus pairs examined.
  std::size_t twins = 0;
};

/// Looks for two alternatives equal on every other attribute, different on
/// `attribute`, and strictly ordered by the overall relation (the relation on
/// every attribute of the performance table).
SeparabilityReport check_separability(const std::string& attribute, const PrimitiveBase& base);

}  // namespace dp
