#include "dp/relation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace dp {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRelation: return "MalformedRelation";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::CyclicStrictPart: return "CyclicStrictPart";
    case ErrorCode::NoDecisionProblem: return "NoDecisionProblem";
    case ErrorCode::MissingNorms: return "MissingNorms";
    case ErrorCode::NotEnumerable: return "NotEnumerable";
    case ErrorCode::EvaluationFailure: return "EvaluationFailure";
    case ErrorCode::NoDecomposition: return "NoDecomposition";
    case ErrorCode::NotAggregable: return "NotAggregable";
    case ErrorCode::UnknownReference: return "UnknownReference";
    case ErrorCode::InconsistentStatements: return "InconsistentStatements";
    case ErrorCode::DependentDimensions: return "DependentDimensions";
    case ErrorCode::IntransitiveSwaps: return "IntransitiveSwaps";
    case ErrorCode::IncompleteElicitation: return "IncompleteElicitation";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::NoAdmissibleArchetype: return "NoAdmissibleArchetype";
    case ErrorCode::CarrierMismatch: return "CarrierMismatch";
    case ErrorCode::NotCommensurable: return "NotCommensurable";
    case ErrorCode::NotTotalImportance: return "NotTotalImportance";
    case ErrorCode::NotRepresentable: return "NotRepresentable";
    case ErrorCode::UnconfiguredNode: return "UnconfiguredNode";
    case ErrorCode::MalformedNorms: return "MalformedNorms";
    case ErrorCode::AmbiguousAssignment: return "AmbiguousAssignment";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::InvalidFixture: return "InvalidFixture";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::StartupError: return "StartupError";
    case ErrorCode::UnsupportedStatement: return "UnsupportedStatement";
    case ErrorCode::MalformedPartition: return "MalformedPartition";
    case ErrorCode::InvalidFormulation: return "InvalidFormulation";
  }
  return "Unknown";
}

std::vector<ElementId> make_ids(std::initializer_list<const char*> tokens) {
  std::vector<ElementId> ids;
  ids.reserve(tokens.size());
  for (const char* t : tokens) ids.emplace_back(t);
  return ids;
}

Relation::Relation(std::vector<ElementId> carrier, RelationKind kind, std::vector<ElementId> norms)
    : carrier_(std::move(carrier)), norms_(std::move(norms)), kind_(kind) {
  if (kind_ != RelationKind::absolute && !norms_.empty())
    throw Error(ErrorCode::MalformedRelation, "only absolute relations declare norms");
  for (std::size_t i = 0; i < universe(); ++i) {
    const ElementId& x = i < carrier_.size() ? carrier_[i] : norms_[i - carrier_.size()];
    if (!index_.emplace(x, i).second)
      throw Error(ErrorCode::MalformedRelation, "duplicate element '" + x.str() + "'");
  }
  bits_.assign(universe() * universe(), 0);
}

Relation Relation::from_pairs(std::vector<ElementId> carrier, std::span<const ElementPair> pairs,
                              RelationKind kind, std::vector<ElementId> norms) {
  Relation r(std::move(carrier), kind, std::move(norms));
  for (const auto& [x, y] : pairs) r.add(x, y);
  return r;
}

Relation Relation::from_pairs(std::vector<ElementId> carrier,
                              std::initializer_list<ElementPair> pairs, RelationKind kind,
                              std::vector<ElementId> norms) {
  return from_pairs(std::move(carrier), std::span<const ElementPair>(pairs.begin(), pairs.size()),
                    kind, std::move(norms));
}

Relation Relation::complete(std::vector<ElementId> carrier) {
  Relation r(std::move(carrier));
  std::fill(r.bits_.begin(), r.bits_.end(), 1);
  return r;
}

std::optional<std::size_t> Relation::find(const ElementId& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Relation::index_of(const ElementId& x) const {
  auto i = find(x);
  if (!i) throw Error(ErrorCode::MalformedRelation, "'" + x.str() + "' is not in the carrier");
  return *i;
}

const ElementId& Relation::id(std::size_t index) const {
  return index < carrier_.size() ? carrier_[index] : norms_.at(index - carrier_.size());
}

void Relation::check_pair(std::size_t i, std::size_t j) const {
  if (i >= universe() || j >= universe())
    throw Error(ErrorCode::MalformedRelation, "pair index out of range");
  if (i >= size() && j >= size())
    throw Error(ErrorCode::MalformedRelation, "a pair cannot relate two norms");
}

bool Relation::holds(const ElementId& x, const ElementId& y) const {
  auto i = find(x);
  auto j = find(y);
  return i && j && holds(*i, *j);
}

void Relation::set(std::size_t i, std::size_t j, bool value) {
  check_pair(i, j);
  bits_[i * universe() + j] = value ? 1 : 0;
}

void Relation::add(const ElementId& x, const ElementId& y) { set(index_of(x), index_of(y), true); }
void Relation::remove(const ElementId& x, const ElementId& y) {
  set(index_of(x), index_of(y), false);
}

std::size_t Relation::pair_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<ElementPair> Relation::pairs() const {
  std::vector<ElementPair> out;
  for (std::size_t i = 0; i < universe(); ++i)
    for (std::size_t j = 0; j < universe(); ++j)
      if (holds(i, j)) out.emplace_back(id(i), id(j));
  return out;
}

Relation Relation::reflexive_closure() const {
  Relation r = *this;
  for (std::size_t i = 0; i < size(); ++i) r.bits_[i * universe() + i] = 1;
  return r;
}

Relation Relation::converse() const {
  Relation r = *this;
  for (std::size_t i = 0; i < universe(); ++i)
    for (std::size_t j = 0; j < universe(); ++j) r.bits_[i * universe() + j] = holds(j, i);
  return r;
}

Relation Relation::restricted(std::span<const std::size_t> keep) const {
  if (kind_ == RelationKind::absolute)
    throw Error(ErrorCode::MalformedRelation, "restriction is defined on relative relations");
  std::vector<ElementId> sub;
  sub.reserve(keep.size());
  for (std::size_t i : keep) sub.push_back(carrier_.at(i));
  Relation r(std::move(sub), kind_);
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b) r.bits_[a * keep.size() + b] = holds(keep[a], keep[b]);
  return r;
}

namespace {

void require_relative(const Relation& r, const char* op) {
  if (r.kind() == RelationKind::absolute)
    throw Error(ErrorCode::MalformedRelation, std::string(op) + " requires a relative relation");
}

}  // namespace

PreferenceStructure decompose(const Relation& r) {
  require_relative(r, "decompose");
  const std::size_t n = r.size();
  PreferenceStructure ps{r.reflexive_closure(), Relation(r.carrier(), r.kind()),
                         Relation(r.carrier(), r.kind()), {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!r.holds(i, j)) continue;
      if (r.holds(j, i))
        ps.indifference.set(i, j);
      else
        ps.strict.set(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!r.holds(i, j) && !r.holds(j, i)) ps.incomparable.emplace_back(r.id(i), r.id(j));
  return ps;
}

Relation transitive_closure(const Relation& r) {
  require_relative(r, "transitive_closure");
  Relation c = r;
  const std::size_t n = r.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (!c.holds(i, k)) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (c.holds(k, j)) c.set(i, j);
    }
  return c;
}

PropertyReport check_properties(const Relation& r) {
  require_relative(r, "check_properties");
  const std::size_t n = r.size();
  PropertyReport p{true, true, true, true, false, false};
  for (std::size_t i = 0; i < n; ++i) {
    if (!r.holds(i, i)) p.reflexive = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && r.holds(i, j) && r.holds(j, i)) p.antisymmetric = false;
      if (!r.holds(i, j) && !r.holds(j, i)) p.complete = false;
      if (!r.holds(i, j)) continue;
      for (std::size_t k = 0; k < n && p.transitive; ++k)
        if (r.holds(j, k) && !r.holds(i, k)) p.transitive = false;
    }
  }
  p.partial_order = p.reflexive && p.antisymmetric && p.transitive;
  p.total_preorder = p.reflexive && p.transitive && p.complete;
  return p;
}

std::size_t symmetric_difference(const Relation& a, const Relation& b) {
  if (!a.same_carrier(b)) throw Error(ErrorCode::CarrierMismatch, "symmetric difference");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.universe(); ++i)
    for (std::size_t j = 0; j < a.universe(); ++j) d += a.holds(i, j) != b.holds(i, j);
  return d;
}

std::vector<std::size_t> preorder_levels(const Relation& total_preorder) {
  if (!check_properties(total_preorder).total_preorder)
    throw Error(ErrorCode::MalformedRelation, "level vector requires a total preorder");
  const std::size_t n = total_preorder.size();
  // In a total preorder the number of elements strictly above x fixes its class.
  std::vector<std::size_t> above(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (total_preorder.holds(j, i) && !total_preorder.holds(i, j)) ++above[i];
  std::vector<std::size_t> distinct = above;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::size_t> levels(n);
  for (std::size_t i = 0; i < n; ++i)
    levels[i] = static_cast<std::size_t>(
        std::lower_bound(distinct.begin(), distinct.end(), above[i]) - distinct.begin());
  return levels;
}

Relation preorder_from_levels(std::vector<ElementId> carrier, std::span<const std::size_t> levels) {
  if (levels.size() != carrier.size())
    throw Error(ErrorCode::MalformedRelation, "level vector length differs from carrier");
  Relation r(std::move(carrier));
  for (std::size_t i = 0; i < levels.size(); ++i)
    for (std::size_t j = 0; j < levels.size(); ++j)
      if (levels[i] <= levels[j]) r.set(i, j);
  return r;
}

namespace {

NearestPreorder copeland_preorder(const Relation& closed) {
  const std::size_t n = closed.size();
  std::vector<long> score(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (closed.holds(i, j) && !closed.holds(j, i)) {
        ++score[i];
        --score[j];
      }
    }
  std::vector<long> distinct = score;
  std::sort(distinct.begin(), distinct.end(), std::greater<>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::size_t> levels(n);
  for (std::size_t i = 0; i < n; ++i)
    levels[i] = static_cast<std::size_t>(
        std::find(distinct.begin(), distinct.end(), score[i]) - distinct.begin());
  Relation t = preorder_from_levels(closed.carrier(), levels);
  std::size_t d = symmetric_difference(t, closed);
  return {std::move(t), d};
}

NearestPreorder exact_preorder(const Relation& closed) {
  const std::size_t n = closed.size();
  const std::size_t full = (std::size_t{1} << n) - 1;
  auto bit = [](std::size_t i) { return std::size_t{1} << i; };

  // Pair costs against the closed input for the three placements of {i, j}.
  std::vector<std::size_t> tie(n * n), above(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      tie[i * n + j] = !closed.holds(i, j) + !closed.holds(j, i);
      above[i * n + j] = !closed.holds(i, j) + closed.holds(j, i);
    }

  std::vector<std::size_t> within(full + 1, 0);
  for (std::size_t s = 1; s <= full; ++s) {
    std::size_t low = static_cast<std::size_t>(__builtin_ctzll(s));
    std::size_t rest = s & (s - 1);
    std::size_t c = within[rest];
    for (std::size_t j = 0; j < n; ++j)
      if (rest & bit(j)) c += tie[low * n + j];
    within[s] = c;
  }
  // above_into[i][V]: cost of placing i strictly above every element of V.
  std::vector<std::size_t> above_into(n * (full + 1), 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t v = 1; v <= full; ++v) {
      std::size_t low = static_cast<std::size_t>(__builtin_ctzll(v));
      above_into[i * (full + 1) + v] = above_into[i * (full + 1) + (v & (v - 1))] + above[i * n + low];
    }

  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> best(full + 1, kInf);
  std::vector<std::vector<std::size_t>> levels(full + 1, std::vector<std::size_t>(n, 0));
  best[0] = 0;
  std::vector<std::size_t> candidate(n);
  for (std::size_t u = 1; u <= full; ++u) {
    for (std::size_t s = u; s != 0; s = (s - 1) & u) {
      const std::size_t rest = u & ~s;
      std::size_t cost = within[s] + best[rest];
      for (std::size_t i = 0; i < n; ++i)
        if (s & bit(i)) cost += above_into[i * (full + 1) + rest];
      if (cost > best[u]) continue;
      for (std::size_t i = 0; i < n; ++i)
        candidate[i] = (s & bit(i)) ? 0 : (rest & bit(i)) ? 1 + levels[rest][i] : 0;
      if (cost < best[u] || candidate < levels[u]) {
        best[u] = cost;
        levels[u] = candidate;
      }
    }
  }
  return {preorder_from_levels(closed.carrier(), levels[full]), best[full]};
}

}  // namespace

NearestPreorder nearest_total_preorder(const Relation& r, PreorderMode mode, std::size_t exact_cap) {
  require_relative(r, "nearest_total_preorder");
  Relation closed = r.reflexive_closure();
  if (check_properties(closed).total_preorder) return {std::move(closed), 0};
  if (mode == PreorderMode::heuristic) return copeland_preorder(closed);
  if (r.size() > exact_cap || r.size() > 20)
    throw Error(ErrorCode::CapExceeded, "exact preorder search on " + std::to_string(r.size()) +
                                            " elements exceeds cap " + std::to_string(exact_cap));
  return exact_preorder(closed);
}

bool strict_part_acyclic(const Relation& r) {
  const std::size_t n = r.size();
  std::vector<std::size_t> indegree(n, 0);
  auto strict = [&](std::size_t i, std::size_t j) { return r.holds(i, j) && !r.holds(j, i); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (strict(i, j)) ++indegree[j];
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push_back(i);
  std::size_t seen = 0;
  while (!ready.empty()) {
    std::size_t i = ready.back();
    ready.pop_back();
    ++seen;
    for (std::size_t j = 0; j < n; ++j)
      if (strict(i, j) && --indegree[j] == 0) ready.push_back(j);
  }
  return seen == n;
}

std::vector<ElementId> maximal_elements(const Relation& r) {
  require_relative(r, "maximal_elements");
  if (!strict_part_acyclic(r))
    throw Error(ErrorCode::CyclicStrictPart, "strict part has a cycle; repair with nearest_total_preorder");
  std::vector<ElementId> out;
  for (std::size_t x = 0; x < r.size(); ++x) {
    bool dominated = false;
    for (std::size_t y = 0; y < r.size() && !dominated; ++y)
      dominated = r.holds(y, x) && !r.holds(x, y);
    if (!dominated) out.push_back(r.id(x));
  }
  return out;
}

Partition::Partition(std::vector<std::vector<ElementId>> classes, bool ordered,
                     std::vector<std::string> labels)
    : classes_(std::move(classes)), ordered_(ordered), labels_(std::move(labels)) {
  if (!labels_.empty() && labels_.size() != classes_.size())
    throw Error(ErrorCode::MalformedPartition, "one label per class required");
  std::map<ElementId, std::size_t> seen;
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    if (classes_[c].empty()) throw Error(ErrorCode::MalformedPartition, "empty class");
    for (const auto& x : classes_[c])
      if (!seen.emplace(x, c).second)
        throw Error(ErrorCode::MalformedPartition, "'" + x.str() + "' appears in two classes");
  }
}

Relation Partition::class_order() const {
  std::vector<ElementId> idx;
  for (std::size_t c = 0; c < classes_.size(); ++c) idx.emplace_back(std::to_string(c));
  Relation r(std::move(idx));
  if (ordered_)
    for (std::size_t i = 0; i < classes_.size(); ++i)
      for (std::size_t j = i; j < classes_.size(); ++j) r.set(i, j);
  return r;
}

std::optional<std::size_t> Partition::class_of(const ElementId& x) const {
  for (std::size_t c = 0; c < classes_.size(); ++c)
    if (std::find(classes_[c].begin(), classes_[c].end(), x) != classes_[c].end()) return c;
  return std::nullopt;
}

void Partition::check_covers(std::span<const ElementId> carrier) const {
  std::size_t count = 0;
  for (const auto& c : classes_) count += c.size();
  if (count != carrier.size())
    throw Error(ErrorCode::MalformedPartition, "classes do not cover the carrier exactly");
  for (const auto& x : carrier)
    if (!class_of(x)) throw Error(ErrorCode::MalformedPartition, "'" + x.str() + "' is unclassified");
}

Partition levels_partition(const Relation& r) {
  require_relative(r, "levels_partition");
  if (!strict_part_acyclic(r))
    throw Error(ErrorCode::CyclicStrictPart, "strict part has a cycle; repair with nearest_total_preorder");
  std::vector<std::size_t> remaining(r.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<std::vector<ElementId>> classes;
  while (!remaining.empty()) {
    Relation sub = r.restricted(remaining);
    std::vector<ElementId> top = maximal_elements(sub);
    std::vector<std::size_t> next;
    for (std::size_t i : remaining)
      if (std::find(top.begin(), top.end(), r.id(i)) == top.end()) next.push_back(i);
    classes.push_back(std::move(top));
    remaining = std::move(next);
  }
  return Partition(std::move(classes), true);
}

std::string render_order(const Partition& p) {
  std::ostringstream os;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (c) os << (p.ordered() ? " ≻ " : " | ");
    for (std::size_t k = 0; k < p.classes()[c].size(); ++k) {
      if (k) os << " ~ ";
      os << p.classes()[c][k].str();
    }
  }
  return os.str();
}

}  // namespace dp
