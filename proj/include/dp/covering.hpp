#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dp {

enum class CoverMode { full_cover, max_cover };
enum class CoverAlgorithm { exact, greedy, brute_force };

inline constexpr std::size_t kCoveringExactCap = 24;
inline constexpr std::size_t kCoveringBruteForceCap = 24;

/// gamma[i][j]: a facility opened in district j covers district i. Must be
/// square and reflexive.
struct CoveringInstance {
  std::vector<std::vector<bool>> gamma;
  CoverMode mode = CoverMode::full_cover;
  /// k_j; empty means unit costs.
  std::vector<double> costs;
  std::optional<double> budget;
  /// p_j; empty means unit populations.
  std::vector<double> populations;
  /// Minimum covered population.
  std::optional<double> target;

  std::size_t size() const noexcept { return gamma.size(); }
  double cost(std::size_t j) const { return costs.empty() ? 1.0 : costs[j]; }
  double population(std::size_t j) const { return populations.empty() ? 1.0 : populations[j]; }
  /// Throws InvalidFixture.
  void validate() const;

  bool operator==(const CoveringInstance&) const = default;
};

struct CoveringSolution {
  std::vector<bool> open;
  std::vector<bool> covered;
  /// o: number of openings.
  std::size_t openings = 0;
  /// c: number of covered districts.
  std::size_t coverage = 0;
  double cost = 0;
  double population = 0;
};

/// exact: branch and bound (full cover: minimum openings; max cover: most
/// districts covered, then fewest openings). greedy: open the district that
/// covers most uncovered ones, lowest index on ties. brute_force: all 2^n
/// opening vectors, the first optimum in increasing bitmask order.
///
/// Throws Infeasible when no opening vector meets the constraints,
/// CapExceeded above the size caps.
CoveringSolution optimize_covering(const CoveringInstance& inst, CoverAlgorithm algorithm);

CoveringSolution evaluate_openings(const CoveringInstance& inst, const std::vector<bool>& open);

/// One row per district of 0/1 entries, blanks optional; '#' starts a comment.
CoveringInstance parse_covering_matrix(const std::string& text);
std::string format_covering_matrix(const CoveringInstance& inst);

/// Closed neighbourhoods of a path and of a complete graph.
CoveringInstance path_instance(std::size_t n);
CoveringInstance complete_instance(std::size_t n);

/// Seeded random geometric graph on the unit square: districts are adjacent
/// when closer than `radius`.
CoveringInstance random_geometric_instance(std::size_t n, double radius, std::uint64_t seed);

/// 1-based indices of opened districts, e.g. "{2,5}".
std::string format_openings(const CoveringSolution& s);

}  // namespace dp
