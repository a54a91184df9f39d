#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dp/expression.hpp"
#include "dp/relation.hpp"

namespace dp {

struct Domain {
  enum class Type { binary, integer_range, real_interval, labels };

  Type type = Type::binary;
  double lo = 0;
  double hi = 1;
  std::vector<std::string> labels;

  static Domain binary() { return {}; }
  static Domain integer_range(long lo, long hi) {
    return {Type::integer_range, static_cast<double>(lo), static_cast<double>(hi), {}};
  }
  static Domain real_interval(double lo, double hi) { return {Type::real_interval, lo, hi, {}}; }
  static Domain enumerated(std::vector<std::string> labels) {
    return {Type::labels, 0, labels.empty() ? 0.0 : static_cast<double>(labels.size() - 1), std::move(labels)};
  }

  bool finite() const noexcept { return type != Type::real_interval; }
  /// Number of values; only meaningful when finite().
  std::uint64_t cardinality() const;
  double value_at(std::uint64_t k) const;
  bool contains(double v) const;
  std::optional<double> code_of(std::string_view label) const;
  /// Label for enumerated domains, shortest decimal otherwise.
  std::string describe(double v) const;
  /// Throws InvalidFormulation on empty ranges or duplicate labels.
  void validate(const std::string& owner) const;

  bool operator==(const Domain&) const = default;
};

struct Variable {
  std::string name;
  Domain domain;
  bool operator==(const Variable&) const = default;
};

/// One point of the variables space. Values follow the owning set's variable
/// order; enumerated labels are stored as their code.
class Alternative {
 public:
  Alternative() = default;
  Alternative(std::shared_ptr<const std::vector<Variable>> variables, std::vector<double> values,
              std::string id = {});

  const std::string& id() const noexcept { return id_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<Variable>& variables() const { return *variables_; }
  std::optional<double> value(std::string_view name) const;
  ExpressionContext context() const;

  bool operator==(const Alternative& other) const { return id_ == other.id_ && values_ == other.values_; }

 private:
  std::shared_ptr<const std::vector<Variable>> variables_;
  std::vector<double> values_;
  std::string id_;
};

/// Default identifier: the label/value itself for one variable, else
/// "name=value" pairs joined by ','.
std::string alternative_id(const std::vector<Variable>& variables, std::span<const double> values);

enum class Sense { le, ge, eq };

struct LinearConstraint {
  std::map<std::string, double> coefficients;
  Sense sense = Sense::ge;
  double rhs = 0;
  bool operator==(const LinearConstraint&) const = default;
};

/// Named hook resolved through the predicate registry at evaluation time.
struct ExtensionPredicate {
  std::string name;
  bool operator==(const ExtensionPredicate&) const = default;
};

using FeasibilityPredicate = std::variant<LinearConstraint, ExtensionPredicate>;

using PredicateFn = std::function<bool(const Alternative&)>;
void register_predicate(const std::string& name, PredicateFn fn);

struct ExplicitMember {
  std::string id;
  std::map<std::string, double> assignment;
  bool operator==(const ExplicitMember&) const = default;
};

/// Set A of alternatives: the feasible part of the product of the variable
/// domains, or an explicit member list.
struct AlternativeSet {
  std::vector<Variable> variables;
  std::vector<FeasibilityPredicate> feasibility;
  std::optional<std::vector<ExplicitMember>> explicit_members;

  bool feasible(const Alternative& alt) const;
  Alternative make(std::span<const double> values, std::string id = {}) const;
  Alternative make(const ExplicitMember& member) const;
  std::shared_ptr<const std::vector<Variable>> shared_variables() const;

  bool operator==(const AlternativeSet&) const = default;
};

enum class Scale { nominal, ordinal, interval, ratio };
enum class Origin { value, opinion, scenario };
/// increasing: higher values are better; decreasing: cost-like.
enum class Direction { increasing, decreasing };
enum class AggregationFn { sum, min, max, custom };

struct Codomain {
  /// Ordered worst to best when the scale is not nominal.
  std::vector<std::string> labels;
  double lo = 0;
  double hi = 0;

  bool numeric() const noexcept { return labels.empty(); }
  std::optional<double> code_of(std::string_view label) const;
  bool operator==(const Codomain&) const = default;
};

struct Decomposition {
  /// Sub-evaluator per variable; the identifier `x` denotes that variable's value.
  std::map<std::string, Expression> per_variable;
  AggregationFn function = AggregationFn::sum;
  std::string custom_name;
  bool operator==(const Decomposition&) const = default;
};

using CustomAggregationFn = std::function<double(std::span<const double>)>;
void register_aggregation(const std::string& name, CustomAggregationFn fn);

struct Attribute {
  std::string name;
  Scale scale = Scale::ordinal;
  Codomain codomain;
  Origin origin = Origin::value;
  bool separable = true;
  Direction direction = Direction::increasing;
  /// Absent for attributes whose preferences are elicited pairwise.
  std::optional<Expression> evaluator;
  std::optional<Decomposition> decomposition;

  bool operator==(const Attribute&) const = default;
};

enum class StatementKind { ranking, rating, clustering, assignment };
enum class Comparison { relative, absolute };

struct NormLevel {
  std::string id;
  /// attribute -> threshold; nominal attributes match by equality, others by
  /// reaching the threshold in the attribute's preferred direction.
  std::map<std::string, double> thresholds;
  bool operator==(const NormLevel&) const = default;
};

struct NormSet {
  std::string name;
  /// Best first.
  std::vector<NormLevel> levels;
  bool operator==(const NormSet&) const = default;
};

struct ProblemStatement {
  StatementKind kind = StatementKind::ranking;
  std::optional<std::size_t> class_count;
  std::optional<std::vector<std::size_t>> class_cardinalities;
  std::optional<NormSet> norms;
  bool operator==(const ProblemStatement&) const = default;
};

struct ProblemFormulation {
  AlternativeSet alternatives;
  std::vector<Attribute> attributes;
  ProblemStatement statement;
  bool operator==(const ProblemFormulation&) const = default;
};

std::string_view to_string(StatementKind k);
std::string_view to_string(Scale s);
std::string_view to_string(Origin o);

StatementKind classify_problem_statement(bool ordered_classes, Comparison comparison);

struct Diagnostics {
  bool ok = false;
  /// Ranking with exactly two classes.
  bool choice = false;
  std::vector<std::string> notes;
};

/// Throws NoDecisionProblem, MissingNorms, UnknownReference or
/// InvalidFormulation; otherwise returns ok diagnostics.
Diagnostics validate_formulation(const ProblemFormulation& f);

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 21;

struct Enumeration {
  std::vector<Alternative> alternatives;
  /// Exact feasible count, or nullopt ("uncounted") beyond the cap.
  std::optional<std::uint64_t> total;
};

/// Streams feasible alternatives in lexicographic variable order (first
/// variable most significant). The visitor returns false to stop. Throws
/// NotEnumerable for infinite domains without explicit members.
void for_each_alternative(const AlternativeSet& set, const std::function<bool(const Alternative&)>& visit);
Enumeration enumerate_alternatives(const AlternativeSet& set, std::size_t limit,
                                   std::uint64_t cap = kDefaultEnumerationCap);

double evaluate_attribute(const Alternative& alt, const Attribute& attr);
std::vector<double> evaluate(const Alternative& alt, std::span<const Attribute> attributes);
double evaluate_decomposed(const Alternative& alt, const Attribute& attr);
std::string describe_value(const Attribute& attr, double value);

/// Alternatives with their performance vectors.
struct PerformanceTable {
  std::vector<ElementId> carrier;
  std::vector<std::string> attributes;
  std::vector<double> values;  // row-major, carrier x attributes

  double at(std::size_t element, std::size_t attribute) const {
    return values[element * attributes.size() + attribute];
  }
  std::size_t attribute_index(std::string_view name) const;
};

/// Evaluates every listed attribute that has an evaluator or decomposition.
PerformanceTable build_performance_table(std::span<const Alternative> alternatives,
                                         std::span<const Attribute> attributes);

/// Relation induced by one attribute column: nominal -> equality, otherwise
/// "at least as good as" in the attribute's direction.
Relation induced_relation(const PerformanceTable& table, std::size_t column, const Attribute& attr);

}  // namespace dp
