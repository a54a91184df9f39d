#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dp/primitives.hpp"
#include "dp/relation.hpp"

namespace dp {

enum class RequiredProperty { anonymity, unanimity, non_manipulability, explicability };
enum class Archetype { weighted_functional, majority_relational, lexicographic, veto_majority };

std::string_view to_string(Archetype a);
std::string_view to_string(RequiredProperty p);

/// Answers to the five aggregation questions.
struct AggregationProfile {
  std::map<std::string, bool> differences_measurable;
  bool commensurable = false;
  bool preferentially_independent = false;
  bool negative_preferences = false;
  std::set<RequiredProperty> required;
  /// Archetype the client insists on; checked for admissibility.
  std::optional<Archetype> forced;
};

struct Aggregator {
  Archetype archetype = Archetype::majority_relational;
  /// weighted_functional: one weight per dimension, summing to 1.
  std::vector<double> weights;
  /// lexicographic: dimension names, most important first.
  std::vector<std::string> importance_order;
  /// majority and veto_majority.
  double threshold = 0.5;
  std::vector<ElementPair> vetoes;
  /// One line per dispatch decision.
  std::vector<std::string> log;

  bool operator==(const Aggregator&) const = default;
};

/// Total importance order over single attributes from the derived verdicts,
/// most important first; nullopt unless every pair is strictly ordered
/// without cycles.
std::optional<std::vector<std::string>> importance_order(const PrimitiveBase& base,
                                                         std::span<const std::string> attributes);

/// Dispatch table:
///   forced archetype         -> checked, else NoAdmissibleArchetype
///   negative preferences     -> veto_majority, vetoes = explicit negatives
///   commensurable, indep.    -> weighted_functional, equal weights
///   total importance order   -> lexicographic (unless anonymity is required)
///   otherwise                -> majority_relational, strict majority
AggregationProfile default_profile(std::span<const Attribute> attributes);
Aggregator select_archetype(const AggregationProfile& profile, const PrimitiveBase& base);

/// (x, y) kept iff the share of relations holding it reaches `threshold` and
/// no veto names it. The result may be intransitive.
Relation aggregate_majority(std::span<const Relation> relations, double threshold,
                            std::span<const ElementPair> vetoes = {});

/// Scores over a carrier.
struct Valuation {
  std::vector<ElementId> carrier;
  std::vector<double> values;
  bool operator==(const Valuation&) const = default;
};

Valuation aggregate_weighted(std::span<const Valuation> functions, std::span<const double> weights,
                             bool commensurable = true);

/// First dimension on which x and y are not indifferent decides; indifferent
/// everywhere gives indifference. Relations are listed most important first.
Relation aggregate_lexicographic(std::span<const Relation> relations);

/// Indices of `names` sorted by a linear importance relation over them.
/// Throws NotTotalImportance unless the relation is a linear order.
std::vector<std::size_t> order_by_importance(std::span<const std::string> names, const Relation& importance);

Relation relation_from_function(const Valuation& f);
/// Class level from the top, reversed so the best class scores highest.
/// Throws NotRepresentable unless `r` is a total preorder.
Valuation function_from_relation(const Relation& r);

/// Applies an aggregator to child relations named `names`.
Relation apply_aggregator(const Aggregator& agg, std::span<const Relation> relations,
                          std::span<const std::string> names);

enum class NodeTag { attribute, value, opinion, scenario };

struct DimensionNode {
  std::string name;
  NodeTag tag = NodeTag::attribute;
  std::vector<std::string> children;
  std::optional<Relation> relation;
};

struct DimensionTree {
  std::string root;
  std::vector<DimensionNode> nodes;
  /// Node sets folded in one step; the member that is an ancestor of the
  /// others performs the step with its aggregator.
  std::vector<std::set<std::string>> joint_groups;
};

/// Bottom-up fold. Throws UnconfiguredNode for an internal node without an
/// aggregator, MalformedRelation for cycles or unknown children.
Relation aggregate_hierarchy(const DimensionTree& tree, const std::map<std::string, Aggregator>& aggregators);

}  // namespace dp
