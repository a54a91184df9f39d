#include "dp/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace dp {

namespace {

void require_common_carrier(std::span<const Relation> relations) {
  if (relations.empty()) throw Error(ErrorCode::CarrierMismatch, "nothing to aggregate");
  for (const auto& r : relations)
    if (!r.same_carrier(relations.front())) throw Error(ErrorCode::CarrierMismatch, "relations differ in carrier");
}

}  // namespace

std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::weighted_functional: return "weighted_functional";
    case Archetype::majority_relational: return "majority_relational";
    case Archetype::lexicographic: return "lexicographic";
    case Archetype::veto_majority: return "veto_majority";
  }
  return "?";
}

std::string_view to_string(RequiredProperty p) {
  switch (p) {
    case RequiredProperty::anonymity: return "anonymity";
    case RequiredProperty::unanimity: return "unanimity";
    case RequiredProperty::non_manipulability: return "non_manipulability";
    case RequiredProperty::explicability: return "explicability";
  }
  return "?";
}

std::optional<std::vector<std::string>> importance_order(const PrimitiveBase& base,
                                                         std::span<const std::string> attributes) {
  std::vector<ElementId> ids(attributes.begin(), attributes.end());
  Relation imp(ids);
  imp = imp.reflexive_closure();
  for (const auto& v : base.derived_importance) {
    if (v.h.size() != 1 || v.g.size() != 1) continue;
    auto h = imp.find(v.h[0]), g = imp.find(v.g[0]);
    if (!h || !g) continue;
    if (v.verdict == Importance::h_over_g) imp.set(*h, *g);
    if (v.verdict == Importance::g_over_h) imp.set(*g, *h);
  }
  try {
    auto order = order_by_importance(attributes, imp);
    std::vector<std::string> out;
    for (auto i : order) out.push_back(attributes[i]);
    return out;
  } catch (const Error&) {
    return std::nullopt;
  }
}

AggregationProfile default_profile(std::span<const Attribute> attributes) {
  AggregationProfile p;
  for (const auto& a : attributes)
    p.differences_measurable[a.name] = a.scale == Scale::interval || a.scale == Scale::ratio;
  return p;
}

Aggregator select_archetype(const AggregationProfile& profile, const PrimitiveBase& base) {
  const bool all_measurable =
      std::all_of(profile.differences_measurable.begin(), profile.differences_measurable.end(),
                  [](const auto& kv) { return kv.second; });
  if (profile.commensurable && !all_measurable)
    throw Error(ErrorCode::NoAdmissibleArchetype, "commensurable profile with unmeasurable differences");
  const bool anonymous = profile.required.count(RequiredProperty::anonymity) > 0;
  std::vector<std::string> dims;
  for (const auto& [name, measurable] : profile.differences_measurable) dims.push_back(name);
  const std::size_t m = dims.size();
  const double strict_majority = m ? static_cast<double>(m / 2 + 1) / static_cast<double>(m) : 0.5;
  const auto order = importance_order(base, dims);

  Aggregator agg;
  auto weighted = [&] {
    agg.archetype = Archetype::weighted_functional;
    agg.weights.assign(m, m ? 1.0 / static_cast<double>(m) : 0.0);
    agg.log.push_back("commensurable and independent: weighted sum, equal weights");
  };
  auto majority = [&] {
    agg.archetype = Archetype::majority_relational;
    agg.threshold = strict_majority;
    agg.log.push_back("ordinal or incommensurable differences: majority, threshold " + std::to_string(strict_majority));
  };
  auto veto = [&] {
    agg.archetype = Archetype::veto_majority;
    agg.threshold = strict_majority;
    std::set<ElementPair> all;
    for (const auto& [scope, pairs] : base.negatives) all.insert(pairs.begin(), pairs.end());
    agg.vetoes.assign(all.begin(), all.end());
    agg.log.push_back("explicit negatives: majority with " + std::to_string(agg.vetoes.size()) + " vetoes");
  };
  auto lexicographic = [&] {
    agg.archetype = Archetype::lexicographic;
    agg.importance_order = *order;
    agg.log.push_back("total importance order: lexicographic");
  };

  if (profile.forced) {
    switch (*profile.forced) {
      case Archetype::weighted_functional:
        if (!profile.commensurable || !profile.preferentially_independent)
          throw Error(ErrorCode::NoAdmissibleArchetype, "weighted sum needs commensurable, independent dimensions");
        weighted();
        break;
      case Archetype::lexicographic:
        if (!order) throw Error(ErrorCode::NoAdmissibleArchetype, "lexicographic needs a total importance order");
        lexicographic();
        break;
      case Archetype::veto_majority:
        if (!profile.negative_preferences) throw Error(ErrorCode::NoAdmissibleArchetype, "veto needs explicit negatives");
        veto();
        break;
      case Archetype::majority_relational:
        majority();
        break;
    }
  } else if (profile.negative_preferences) {
    veto();
  } else if (profile.commensurable && profile.preferentially_independent) {
    weighted();
  } else if (order && !anonymous) {
    lexicographic();
  } else {
    majority();
  }
  if (anonymous) agg.log.push_back("anonymity: symmetric treatment of dimensions");
  return agg;
}

Relation aggregate_majority(std::span<const Relation> relations, double threshold, std::span<const ElementPair> vetoes) {
  require_common_carrier(relations);
  if (!(threshold >= 0.5 && threshold <= 1.0))
    throw Error(ErrorCode::InvalidFormulation, "majority threshold must lie in [0.5, 1]");
  const Relation& first = relations.front();
  Relation out(first.carrier(), first.kind(), first.norms());
  const std::size_t u = first.universe();
  const double m = static_cast<double>(relations.size());
  for (std::size_t i = 0; i < u; ++i)
    for (std::size_t j = 0; j < u; ++j) {
      if (i >= first.size() && j >= first.size()) continue;
      std::size_t count = 0;
      for (const auto& r : relations) count += r.holds(i, j) ? 1 : 0;
      if (static_cast<double>(count) >= threshold * m - 1e-12) out.set(i, j);
    }
  for (const auto& [x, y] : vetoes) {
    auto i = out.find(x), j = out.find(y);
    if (!i || !j) throw Error(ErrorCode::UnknownReference, "veto names an element outside the carrier");
    out.set(*i, *j, false);
  }
  return out;
}

Valuation aggregate_weighted(std::span<const Valuation> functions, std::span<const double> weights,
                             bool commensurable) {
  if (!commensurable) throw Error(ErrorCode::NotCommensurable, "trade-offs need commensurable dimensions");
  if (functions.empty() || functions.size() != weights.size())
    throw Error(ErrorCode::InvalidFormulation, "one weight per value function");
  double total = 0;
  for (double w : weights) {
    if (w < 0) throw Error(ErrorCode::InvalidFormulation, "negative weight");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw Error(ErrorCode::InvalidFormulation, "weights must sum to 1");
  Valuation out{functions.front().carrier, std::vector<double>(functions.front().carrier.size(), 0.0)};
  for (std::size_t j = 0; j < functions.size(); ++j) {
    if (functions[j].carrier != out.carrier) throw Error(ErrorCode::CarrierMismatch, "value functions differ in carrier");
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += weights[j] * functions[j].values[i];
  }
  return out;
}

Relation aggregate_lexicographic(std::span<const Relation> relations) {
  require_common_carrier(relations);
  const Relation& first = relations.front();
  Relation out(first.carrier());
  const std::size_t n = first.size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      bool decided = false;
      for (const auto& r : relations) {
        const bool xy = r.holds(x, y), yx = r.holds(y, x);
        if (xy && yx) continue;
        if (xy) out.set(x, y);
        decided = true;
        break;
      }
      if (!decided) out.set(x, y);
    }
  return out;
}

std::vector<std::size_t> order_by_importance(std::span<const std::string> names, const Relation& importance) {
  const auto props = check_properties(importance.reflexive_closure());
  if (!props.total_preorder || !props.antisymmetric)
    throw Error(ErrorCode::NotTotalImportance, "importance must be a linear order over the dimensions");
  std::vector<std::size_t> idx(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) idx[i] = importance.index_of(names[i]);
  const auto levels = preorder_levels(importance.reflexive_closure());
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return levels[idx[a]] < levels[idx[b]]; });
  return order;
}

Relation relation_from_function(const Valuation& f) {
  Relation out(f.carrier);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    for (std::size_t j = 0; j < f.values.size(); ++j)
      if (f.values[i] >= f.values[j]) out.set(i, j);
  return out;
}

Valuation function_from_relation(const Relation& r) {
  if (!check_properties(r).total_preorder)
    throw Error(ErrorCode::NotRepresentable, "only total preorders have an ordinal representation");
  const auto levels = preorder_levels(r);
  const std::size_t top = levels.empty() ? 0 : *std::max_element(levels.begin(), levels.end());
  Valuation out{r.carrier(), {}};
  for (auto l : levels) out.values.push_back(static_cast<double>(top - l));
  return out;
}

Relation apply_aggregator(const Aggregator& agg, std::span<const Relation> relations,
                          std::span<const std::string> names) {
  require_common_carrier(relations);
  if (relations.size() == 1 && agg.archetype != Archetype::veto_majority) return relations.front();
  switch (agg.archetype) {
    case Archetype::majority_relational:
      return aggregate_majority(relations, agg.threshold);
    case Archetype::veto_majority:
      return aggregate_majority(relations, agg.threshold, agg.vetoes);
    case Archetype::lexicographic: {
      if (agg.importance_order.empty()) return aggregate_lexicographic(relations);
      std::vector<Relation> ordered;
      for (const auto& name : agg.importance_order) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw Error(ErrorCode::UnknownReference, "importance order names '" + name + "'");
        ordered.push_back(relations[static_cast<std::size_t>(it - names.begin())]);
      }
      if (ordered.size() != relations.size())
        throw Error(ErrorCode::NotTotalImportance, "importance order must list every dimension");
      return aggregate_lexicographic(ordered);
    }
    case Archetype::weighted_functional: {
      std::vector<Valuation> fs;
      for (const auto& r : relations) fs.push_back(function_from_relation(r));
      std::vector<double> w = agg.weights;
      if (w.empty()) w.assign(relations.size(), 1.0 / static_cast<double>(relations.size()));
      return relation_from_function(aggregate_weighted(fs, w));
    }
  }
  throw Error(ErrorCode::UnconfiguredNode, "unknown archetype");
}

Relation aggregate_hierarchy(const DimensionTree& tree, const std::map<std::string, Aggregator>& aggregators) {
  std::map<std::string, const DimensionNode*> by_name;
  for (const auto& n : tree.nodes)
    if (!by_name.emplace(n.name, &n).second) throw Error(ErrorCode::MalformedRelation, "duplicate node '" + n.name + "'");
  auto node = [&](const std::string& name) -> const DimensionNode& {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw Error(ErrorCode::MalformedRelation, "unknown node '" + name + "'");
    return *it->second;
  };
  auto group_of = [&](const std::string& name) -> const std::set<std::string>* {
    for (const auto& g : tree.joint_groups)
      if (g.count(name)) return &g;
    return nullptr;
  };

  std::set<std::string> active;
  std::function<Relation(const std::string&)> fold;
  // Inputs of a node: its children, with members of the node's joint group
  // replaced by their own inputs.
  std::function<void(const DimensionNode&, const std::set<std::string>*, std::vector<Relation>&,
                     std::vector<std::string>&)>
      gather = [&](const DimensionNode& n, const std::set<std::string>* group, std::vector<Relation>& rs,
                   std::vector<std::string>& names) {
        for (const auto& c : n.children) {
          const DimensionNode& child = node(c);
          if (group && group->count(c) && !child.children.empty()) {
            if (!active.insert(c).second) throw Error(ErrorCode::MalformedRelation, "cycle through '" + c + "'");
            gather(child, group, rs, names);
            active.erase(c);
          } else {
            rs.push_back(fold(c));
            names.push_back(c);
          }
        }
      };
  fold = [&](const std::string& name) -> Relation {
    const DimensionNode& n = node(name);
    if (n.children.empty()) {
      if (!n.relation) throw Error(ErrorCode::MalformedRelation, "leaf '" + name + "' carries no relation");
      return *n.relation;
    }
    if (!active.insert(name).second) throw Error(ErrorCode::MalformedRelation, "cycle through '" + name + "'");
    std::vector<Relation> rs;
    std::vector<std::string> names;
    gather(n, group_of(name), rs, names);
    active.erase(name);
    auto it = aggregators.find(name);
    if (it == aggregators.end()) throw Error(ErrorCode::UnconfiguredNode, "node '" + name + "' has no aggregator");
    return apply_aggregator(it->second, rs, names);
  };
  return fold(tree.root);
}

}  // namespace dp
