#include "dp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "dp/aggregation.hpp"

namespace dp {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool meets(const Attribute& a, double value, double threshold) {
  if (a.scale == Scale::nominal) return value == threshold;
  return a.direction == Direction::increasing ? value >= threshold : value <= threshold;
}

const Attribute& attribute_named(std::span<const Attribute> attributes, const std::string& name) {
  for (const auto& a : attributes)
    if (a.name == name) return a;
  throw Error(ErrorCode::UnknownReference, "no attribute '" + name + "'");
}

std::size_t medoid_cost(const std::vector<std::vector<std::size_t>>& d, const std::vector<std::size_t>& medoids) {
  std::size_t total = 0;
  for (std::size_t x = 0; x < d.size(); ++x) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (auto m : medoids) best = std::min(best, d[x][m]);
    total += best;
  }
  return total;
}

Partition medoid_partition(const Relation& r, const std::vector<std::vector<std::size_t>>& d,
                           const std::vector<std::size_t>& medoids) {
  std::vector<std::vector<ElementId>> classes(medoids.size());
  for (std::size_t x = 0; x < d.size(); ++x) {
    std::size_t pick = 0;
    auto self = std::find(medoids.begin(), medoids.end(), x);
    if (self != medoids.end()) {
      pick = static_cast<std::size_t>(self - medoids.begin());
    } else {
      for (std::size_t c = 1; c < medoids.size(); ++c)
        if (d[x][medoids[c]] < d[x][medoids[pick]]) pick = c;
    }
    classes[pick].push_back(r.id(x));
  }
  return Partition(std::move(classes), false);
}

}  // namespace

Partition merge_trailing(const Partition& p, std::size_t count) {
  if (count == 0) throw Error(ErrorCode::InvalidFormulation, "class count must be positive");
  if (p.size() <= count) return p;
  std::vector<std::vector<ElementId>> classes(p.classes().begin(), p.classes().begin() + static_cast<long>(count));
  for (std::size_t c = count; c < p.size(); ++c)
    classes.back().insert(classes.back().end(), p.classes()[c].begin(), p.classes()[c].end());
  return Partition(std::move(classes), p.ordered());
}

NearestPreorder ranking_preorder(const Relation& r, const RankingOptions& options) {
  PreorderMode mode = PreorderMode::exact;
  if (options.mode == SolveMode::heuristic ||
      (options.mode == SolveMode::automatic && r.size() > options.exact_cap))
    mode = PreorderMode::heuristic;
  return nearest_total_preorder(r, mode, options.exact_cap);
}

Partition solve_ranking(const Relation& r, const RankingOptions& options) {
  Partition p = levels_partition(ranking_preorder(r, options).preorder);
  return options.class_count ? merge_trailing(p, *options.class_count) : p;
}

std::vector<Relation> norm_relations(const PerformanceTable& table, std::span<const Attribute> attributes,
                                     const NormSet& norms) {
  if (norms.levels.empty()) throw Error(ErrorCode::MalformedNorms, "norm set '" + norms.name + "' is empty");
  std::vector<ElementId> ids;
  std::set<std::string> used;
  for (const auto& level : norms.levels) {
    ids.emplace_back(level.id);
    for (const auto& [attr, t] : level.thresholds) used.insert(attr);
  }
  if (std::set<ElementId>(ids.begin(), ids.end()).size() != ids.size())
    throw Error(ErrorCode::MalformedNorms, "duplicate norm ids");
  std::vector<Relation> out;
  for (const auto& name : used) {
    const Attribute& a = attribute_named(attributes, name);
    const std::size_t col = table.attribute_index(name);
    Relation r(table.carrier, RelationKind::absolute, ids);
    for (std::size_t x = 0; x < table.carrier.size(); ++x)
      for (std::size_t k = 0; k < norms.levels.size(); ++k) {
        const auto& th = norms.levels[k].thresholds;
        auto it = th.find(name);
        if (it == th.end() || meets(a, table.at(x, col), it->second)) r.set(x, table.carrier.size() + k);
      }
    out.push_back(std::move(r));
  }
  return out;
}

Partition solve_rating(std::span<const Relation> per_dimension, const RatingOptions& options) {
  if (per_dimension.empty()) throw Error(ErrorCode::MalformedNorms, "no dimension to rate on");
  const Relation& first = per_dimension.front();
  const std::size_t n = first.size(), k = first.norms().size();
  if (k == 0) throw Error(ErrorCode::MalformedNorms, "rating needs at least one norm");
  for (const auto& r : per_dimension) {
    if (!r.same_carrier(first)) throw Error(ErrorCode::CarrierMismatch, "dimensions differ in carrier or norms");
    for (std::size_t x = 0; x < n; ++x) {
      bool reached = false;
      for (std::size_t l = 0; l < k; ++l) {
        const bool h = r.holds(x, n + l);
        if (reached && !h)
          throw Error(ErrorCode::MalformedNorms, "'" + r.id(x).str() + "' reaches a norm above '" +
                                                     r.norms()[l].str() + "' but not that norm");
        reached = reached || h;
      }
    }
  }
  const Relation agg = aggregate_majority(per_dimension, options.threshold, options.vetoes);
  std::vector<std::vector<ElementId>> classes(k + 1);
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t c = k;
    for (std::size_t l = 0; l < k; ++l)
      if (agg.holds(x, n + l)) {
        c = l;
        break;
      }
    classes[c].push_back(first.id(x));
  }
  std::vector<std::vector<ElementId>> kept;
  std::vector<std::string> labels;
  for (std::size_t c = 0; c <= k; ++c) {
    if (classes[c].empty()) continue;
    kept.push_back(std::move(classes[c]));
    labels.push_back(c < k ? first.norms()[c].str() : "below " + first.norms()[k - 1].str());
  }
  return Partition(std::move(kept), true, std::move(labels));
}

Partition solve_assignment(const PerformanceTable& table, std::span<const Attribute> attributes,
                           std::span<const AssignmentRule> rules) {
  for (const auto& rule : rules)
    for (const auto& id : rule.predicate.identifiers())
      if (std::find(table.attributes.begin(), table.attributes.end(), id) == table.attributes.end())
        throw Error(ErrorCode::UnknownReference, "rule '" + rule.label + "' uses undeclared attribute '" + id + "'");
  std::vector<std::string> order;
  for (const auto& rule : rules)
    if (std::find(order.begin(), order.end(), rule.label) == order.end()) order.push_back(rule.label);
  std::map<std::string, std::vector<ElementId>> members;
  std::vector<ElementId> unassigned;
  for (std::size_t x = 0; x < table.carrier.size(); ++x) {
    ExpressionContext ctx;
    ctx.value = [&](std::string_view name) -> std::optional<double> {
      auto it = std::find(table.attributes.begin(), table.attributes.end(), name);
      if (it == table.attributes.end()) return std::nullopt;
      return table.at(x, static_cast<std::size_t>(it - table.attributes.begin()));
    };
    ctx.label_code = [&](std::string_view name, std::string_view label) -> std::optional<double> {
      for (const auto& a : attributes)
        if (a.name == name) return a.codomain.code_of(label);
      return std::nullopt;
    };
    const AssignmentRule* chosen = nullptr;
    const AssignmentRule* rival = nullptr;
    for (const auto& rule : rules) {
      if (rule.predicate.evaluate(ctx) == 0.0) continue;
      if (!chosen || rule.priority < chosen->priority) {
        chosen = &rule;
        rival = nullptr;
      } else if (rule.priority == chosen->priority && rule.label != chosen->label && !rival) {
        rival = &rule;
      }
    }
    if (rival)
      throw Error(ErrorCode::AmbiguousAssignment, "'" + table.carrier[x].str() + "' matches '" + chosen->label +
                                                      "' and '" + rival->label + "' at priority " +
                                                      std::to_string(chosen->priority));
    if (chosen)
      members[chosen->label].push_back(table.carrier[x]);
    else
      unassigned.push_back(table.carrier[x]);
  }
  std::vector<std::vector<ElementId>> classes;
  std::vector<std::string> labels;
  for (const auto& label : order)
    if (auto it = members.find(label); it != members.end()) {
      classes.push_back(it->second);
      labels.push_back(label);
    }
  if (!unassigned.empty()) {
    classes.push_back(std::move(unassigned));
    labels.push_back(kUnassigned);
  }
  return Partition(std::move(classes), false, std::move(labels));
}

std::vector<AssignmentRule> rules_from_norms(const NormSet& norms, std::span<const Attribute> attributes) {
  std::vector<AssignmentRule> out;
  for (std::size_t i = 0; i < norms.levels.size(); ++i) {
    const auto& level = norms.levels[i];
    std::string text;
    for (const auto& [name, t] : level.thresholds) {
      const Attribute& a = attribute_named(attributes, name);
      if (!text.empty()) text += " and ";
      const char* op = a.scale == Scale::nominal ? " == " : a.direction == Direction::increasing ? " >= " : " <= ";
      text += name + op + "(" + num(t) + ")";
    }
    out.push_back({level.id, Expression(text.empty() ? "1" : text), static_cast<int>(i)});
  }
  return out;
}

std::vector<std::vector<std::size_t>> profile_distance(const Relation& r) {
  const Relation c = r.reflexive_closure();
  const std::size_t n = c.size();
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, 0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      std::size_t count = 0;
      for (std::size_t z = 0; z < n; ++z)
        if (c.holds(x, z) != c.holds(y, z) || c.holds(z, x) != c.holds(z, y)) ++count;
      d[x][y] = d[y][x] = count;
    }
  return d;
}

Clustering solve_clustering(const Relation& r, std::size_t k, const ClusteringOptions& options) {
  const std::size_t n = r.size();
  if (k < 1 || k > n) throw Error(ErrorCode::BadK, "k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  const auto d = profile_distance(r);
  const bool exact = options.mode == SolveMode::exact ||
                     (options.mode == SolveMode::automatic && n <= options.exact_cap);
  if (options.mode == SolveMode::exact && n > std::max<std::size_t>(options.exact_cap, 20))
    throw Error(ErrorCode::CapExceeded, "exact clustering on " + std::to_string(n) + " elements");
  std::vector<std::size_t> best;
  std::size_t best_cost = std::numeric_limits<std::size_t>::max();
  if (exact) {
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      const std::size_t c = medoid_cost(d, pick);
      if (c < best_cost) {
        best_cost = c;
        best = pick;
      }
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  } else {
    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t rep = 0; rep < std::max<std::size_t>(1, options.restarts); ++rep) {
      std::shuffle(all.begin(), all.end(), rng);
      std::vector<std::size_t> med(all.begin(), all.begin() + static_cast<long>(k));
      std::sort(med.begin(), med.end());
      std::size_t cost = medoid_cost(d, med);
      for (bool improved = true; improved;) {
        improved = false;
        std::vector<std::size_t> best_swap;
        std::size_t best_swap_cost = cost;
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t h = 0; h < n; ++h) {
            if (std::find(med.begin(), med.end(), h) != med.end()) continue;
            auto trial = med;
            trial[i] = h;
            std::sort(trial.begin(), trial.end());
            const std::size_t c = medoid_cost(d, trial);
            if (c < best_swap_cost) {
              best_swap_cost = c;
              best_swap = std::move(trial);
            }
          }
        if (!best_swap.empty()) {
          med = std::move(best_swap);
          cost = best_swap_cost;
          improved = true;
        }
      }
      if (cost < best_cost || (cost == best_cost && med < best)) {
        best_cost = cost;
        best = med;
      }
    }
  }
  return {medoid_partition(r, d, best), best, best_cost};
}

NearestPreorder brute_force_preorder(const Relation& r) {
  const std::size_t n = r.size();
  if (n > kBruteForceCap) throw Error(ErrorCode::CapExceeded, "brute force limited to " + std::to_string(kBruteForceCap));
  const Relation c = r.reflexive_closure();
  std::vector<std::size_t> lv(n, 0), best;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  std::vector<char> used(n);
  while (true) {
    std::fill(used.begin(), used.end(), 0);
    std::size_t top = 0;
    for (auto l : lv) {
      used[l] = 1;
      top = std::max(top, l);
    }
    bool canonical = true;
    for (std::size_t l = 0; l <= top && canonical; ++l) canonical = used[l];
    if (canonical) {
      std::size_t dist = 0;
      for (std::size_t i = 0; i < n && dist < best_d; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (c.holds(i, j) != (lv[i] <= lv[j])) ++dist;
      if (dist < best_d) {
        best_d = dist;
        best = lv;
      }
    }
    std::size_t i = n;
    while (i > 0 && lv[i - 1] == n - 1) lv[--i] = 0;
    if (i == 0) break;
    ++lv[i - 1];
  }
  if (n == 0) return {c, 0};
  return {preorder_from_levels(r.carrier(), best), best_d};
}

Partition brute_force_ranking(const Relation& r, std::optional<std::size_t> class_count) {
  Partition p = levels_partition(brute_force_preorder(r).preorder);
  return class_count ? merge_trailing(p, *class_count) : p;
}

Partition canonical_unordered(const Partition& p, std::span<const ElementId> carrier) {
  std::map<ElementId, std::size_t> pos;
  for (std::size_t i = 0; i < carrier.size(); ++i) pos[carrier[i]] = i;
  auto classes = p.classes();
  for (auto& c : classes)
    std::sort(c.begin(), c.end(), [&](const ElementId& a, const ElementId& b) { return pos.at(a) < pos.at(b); });
  std::sort(classes.begin(), classes.end(),
            [&](const auto& a, const auto& b) { return pos.at(a.front()) < pos.at(b.front()); });
  return Partition(std::move(classes), false);
}

ClusteringOptimum brute_force_clustering(const Relation& r, std::size_t k) {
  const std::size_t n = r.size();
  if (k < 1 || k > n) throw Error(ErrorCode::BadK, "k outside [1, |A|]");
  if (n > kBruteForceCap) throw Error(ErrorCode::CapExceeded, "brute force limited to " + std::to_string(kBruteForceCap));
  const auto d = profile_distance(r);
  ClusteringOptimum out;
  out.cost = std::numeric_limits<std::size_t>::max();
  // Restricted growth strings enumerate each set partition once.
  std::vector<std::size_t> block(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (i == n) {
      if (used != k) return;
      std::size_t cost = 0;
      for (std::size_t b = 0; b < k; ++b) {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (std::size_t m = 0; m < n; ++m) {
          if (block[m] != b) continue;
          std::size_t s = 0;
          for (std::size_t x = 0; x < n; ++x)
            if (block[x] == b) s += d[x][m];
          best = std::min(best, s);
        }
        cost += best;
      }
      if (cost > out.cost) return;
      if (cost < out.cost) {
        out.cost = cost;
        out.optima.clear();
      }
      std::vector<std::vector<ElementId>> classes(k);
      for (std::size_t x = 0; x < n; ++x) classes[block[x]].push_back(r.id(x));
      out.optima.emplace_back(std::move(classes), false);
      return;
    }
    if (used + (n - i) < k) return;
    for (std::size_t b = 0; b <= used && b < k; ++b) {
      block[i] = b;
      rec(i + 1, b == used ? used + 1 : used);
    }
  };
  rec(0, 0);
  return out;
}

}  // namespace dp
