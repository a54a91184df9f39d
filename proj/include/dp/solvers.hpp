#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dp/expression.hpp"
#include "dp/formulation.hpp"
#include "dp/relation.hpp"

namespace dp {

enum class SolveMode { automatic, exact, heuristic };

struct RankingOptions {
  std::optional<std::size_t> class_count;
  SolveMode mode = SolveMode::automatic;
  std::size_t exact_cap = kDefaultExactCap;
};

/// Nearest total preorder, peeled into levels; with class_count, trailing
/// levels merge into the last class (two classes: best level vs the rest).
Partition solve_ranking(const Relation& r, const RankingOptions& options = {});
/// Distance of the repaired preorder used by the last call pattern above.
NearestPreorder ranking_preorder(const Relation& r, const RankingOptions& options = {});

/// Merges classes beyond `count` into the last one.
Partition merge_trailing(const Partition& p, std::size_t count);

/// Absolute relations of the carrier against each norm level, one per
/// attribute with a threshold. Norm ids come from the set, best first.
std::vector<Relation> norm_relations(const PerformanceTable& table, std::span<const Attribute> attributes,
                                     const NormSet& norms);

struct RatingOptions {
  /// Share of dimensions that must reach a norm; 1.0 is conjunctive.
  double threshold = 1.0;
  std::vector<ElementPair> vetoes;
};

/// Class k holds alternatives whose best reached norm is level k (norms best
/// first); the bottom class holds the rest. Empty classes are dropped.
/// Throws MalformedNorms when some dimension is met at a level but missed at a
/// lower one, or when no norms are declared.
Partition solve_rating(std::span<const Relation> per_dimension, const RatingOptions& options = {});

struct AssignmentRule {
  std::string label;
  Expression predicate;
  /// Smaller runs first.
  int priority = 0;
};

inline constexpr const char* kUnassigned = "unassigned";

/// Throws AmbiguousAssignment when two rules with the same priority and
/// different labels both match, UnknownReference for undeclared attributes.
Partition solve_assignment(const PerformanceTable& table, std::span<const Attribute> attributes,
                           std::span<const AssignmentRule> rules);

/// Rules from a norm set: level i matches when every threshold is reached
/// (nominal attributes by equality); priority follows the level order.
std::vector<AssignmentRule> rules_from_norms(const NormSet& norms, std::span<const Attribute> attributes);

struct ClusteringOptions {
  SolveMode mode = SolveMode::automatic;
  std::size_t exact_cap = 8;
  std::uint64_t seed = 1;
  std::size_t restarts = 8;
};

/// d(x, y) = number of z on which x and y relate differently to z, read on
/// the reflexive closure in both directions.
std::vector<std::vector<std::size_t>> profile_distance(const Relation& r);

struct Clustering {
  Partition partition;
  std::vector<std::size_t> medoids;
  std::size_t cost = 0;
};

/// k-medoids minimising total distance to the medoid. Exact enumeration of
/// medoid sets up to exact_cap elements (ties: lexicographically first set),
/// seeded PAM swaps beyond. Classes follow medoid order; each element joins
/// its nearest medoid, lowest index on ties. Throws BadK unless 1 <= k <= |A|.
Clustering solve_clustering(const Relation& r, std::size_t k, const ClusteringOptions& options = {});

inline constexpr std::size_t kBruteForceCap = 8;

/// Exhaustive search over all total preorders, same objective and tie-break
/// as the exact ranking solver.
Partition brute_force_ranking(const Relation& r, std::optional<std::size_t> class_count = std::nullopt);
NearestPreorder brute_force_preorder(const Relation& r);

/// Exhaustive search over all partitions into k non-empty blocks, each block
/// scored by its best medoid. Returns the optimum cost and every optimal
/// partition (classes sorted by first member, members in carrier order).
struct ClusteringOptimum {
  std::size_t cost = 0;
  std::vector<Partition> optima;
};
ClusteringOptimum brute_force_clustering(const Relation& r, std::size_t k);

/// Canonical form for comparing unordered partitions: members in carrier
/// order, classes sorted by their first member.
Partition canonical_unordered(const Partition& p, std::span<const ElementId> carrier);

}  // namespace dp
