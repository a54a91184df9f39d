#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dp/error.hpp"

namespace dp {

/// Opaque token naming an element of a carrier set (alternative, norm,
/// attribute subset). Never empty.
class ElementId {
 public:
  ElementId(std::string token) : token_(std::move(token)) {
    if (token_.empty()) throw Error(ErrorCode::MalformedRelation, "empty element id");
  }
  ElementId(const char* token) : ElementId(std::string(token)) {}

  const std::string& str() const noexcept { return token_; }
  auto operator<=>(const ElementId&) const = default;

 private:
  std::string token_;
};

std::vector<ElementId> make_ids(std::initializer_list<const char*> tokens);

enum class RelationKind { relative, absolute, second_order };

using ElementPair = std::pair<ElementId, ElementId>;

/// Crisp binary relation over an ordered carrier. Absolute relations also
/// declare a norm set; their pairs link carrier elements with norms (or two
/// carrier elements), never two norms.
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::vector<ElementId> carrier, RelationKind kind = RelationKind::relative,
                    std::vector<ElementId> norms = {});

  static Relation from_pairs(std::vector<ElementId> carrier, std::span<const ElementPair> pairs,
                             RelationKind kind = RelationKind::relative,
                             std::vector<ElementId> norms = {});
  static Relation from_pairs(std::vector<ElementId> carrier,
                             std::initializer_list<ElementPair> pairs,
                             RelationKind kind = RelationKind::relative,
                             std::vector<ElementId> norms = {});
  /// Full relation carrier x carrier.
  static Relation complete(std::vector<ElementId> carrier);

  const std::vector<ElementId>& carrier() const noexcept { return carrier_; }
  const std::vector<ElementId>& norms() const noexcept { return norms_; }
  RelationKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return carrier_.size(); }
  /// Carrier plus norms; indices >= size() address norms.
  std::size_t universe() const noexcept { return carrier_.size() + norms_.size(); }

  bool holds(std::size_t i, std::size_t j) const { return bits_[i * universe() + j] != 0; }
  bool holds(const ElementId& x, const ElementId& y) const;
  void set(std::size_t i, std::size_t j, bool value = true);
  void add(const ElementId& x, const ElementId& y);
  void remove(const ElementId& x, const ElementId& y);

  std::optional<std::size_t> find(const ElementId& x) const;
  std::size_t index_of(const ElementId& x) const;
  const ElementId& id(std::size_t index) const;

  std::size_t pair_count() const;
  /// Pairs in row-major index order.
  std::vector<ElementPair> pairs() const;

  Relation reflexive_closure() const;
  Relation converse() const;
  /// Relation induced on the listed carrier indices (kept in the given order).
  Relation restricted(std::span<const std::size_t> keep) const;

  bool same_carrier(const Relation& other) const {
    return carrier_ == other.carrier_ && norms_ == other.norms_;
  }
  bool operator==(const Relation& other) const = default;

 private:
  void check_pair(std::size_t i, std::size_t j) const;

  std::vector<ElementId> carrier_;
  std::vector<ElementId> norms_;
  RelationKind kind_ = RelationKind::relative;
  std::map<ElementId, std::size_t> index_;
  std::vector<std::uint8_t> bits_;
};

/// weak = reflexive closure of the input; strict and indifference are read
/// off the input exactly as given.
struct PreferenceStructure {
  Relation weak;
  Relation strict;
  Relation indifference;
  /// Unordered pairs {x, y}, x before y in carrier order, related neither way.
  std::vector<ElementPair> incomparable;
};

struct PropertyReport {
  bool reflexive = false;
  bool antisymmetric = false;
  bool transitive = false;
  bool complete = false;
  bool partial_order = false;
  bool total_preorder = false;
};

PreferenceStructure decompose(const Relation& r);
Relation transitive_closure(const Relation& r);
PropertyReport check_properties(const Relation& r);

/// Symmetric-difference cardinality of the pair sets (carriers must match).
std::size_t symmetric_difference(const Relation& a, const Relation& b);

enum class PreorderMode { exact, heuristic };

struct NearestPreorder {
  Relation preorder;
  /// Distance to the reflexive closure of the input.
  std::size_t distance = 0;
};

inline constexpr std::size_t kDefaultExactCap = 8;

/// Total preorder closest to `r` in symmetric-difference distance.
///
/// Exact mode solves the problem globally with a subset dynamic program
/// (O(3^n)); among optimal preorders it returns the one whose level vector
/// (class index of each carrier element, best class = 0) is lexicographically
/// smallest. Heuristic mode ranks by Copeland score (strict wins minus strict
/// losses), equal scores sharing a class.
NearestPreorder nearest_total_preorder(const Relation& r, PreorderMode mode,
                                       std::size_t exact_cap = kDefaultExactCap);

/// Elements with nothing strictly above them. Throws CyclicStrictPart.
std::vector<ElementId> maximal_elements(const Relation& r);
bool strict_part_acyclic(const Relation& r);

/// Level vector of a total preorder: 0 for the best class, increasing downwards.
std::vector<std::size_t> preorder_levels(const Relation& total_preorder);
Relation preorder_from_levels(std::vector<ElementId> carrier, std::span<const std::size_t> levels);

/// Classes of a partition of a carrier. Ordered partitions carry the class
/// order as a relation over class indices ("0", "1", ...), class i at least as
/// good as class j iff i <= j.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<std::vector<ElementId>> classes, bool ordered,
            std::vector<std::string> labels = {});

  const std::vector<std::vector<ElementId>>& classes() const noexcept { return classes_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  bool ordered() const noexcept { return ordered_; }
  std::size_t size() const noexcept { return classes_.size(); }
  Relation class_order() const;
  std::optional<std::size_t> class_of(const ElementId& x) const;
  /// Throws MalformedPartition unless the classes cover exactly `carrier`.
  void check_covers(std::span<const ElementId> carrier) const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<std::vector<ElementId>> classes_;
  bool ordered_ = false;
  std::vector<std::string> labels_;
};

/// Peels maximal elements repeatedly. Throws CyclicStrictPart.
Partition levels_partition(const Relation& r);

/// "a ≻ b ~ c" style rendering of an ordered partition.
std::string render_order(const Partition& p);

}  // namespace dp
