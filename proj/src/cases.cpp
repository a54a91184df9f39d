#include "dp/cases.hpp"

#include <algorithm>
#include <sstream>

#include "dp/solvers.hpp"

namespace dp {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string xname(std::size_t j) { return "x" + std::to_string(j + 1); }
std::string yname(std::size_t j) { return "y" + std::to_string(j + 1); }

// Top class of the generic ranking over every feasible alternative.
std::optional<std::vector<Alternative>> pipeline_top(const CoveringCase& c) {
  std::uint64_t space = 1;
  for (const auto& v : c.formulation.alternatives.variables) {
    space *= v.domain.cardinality();
    if (space > kPipelineCap) return std::nullopt;
  }
  const Enumeration e = enumerate_alternatives(c.formulation.alternatives, kPipelineCap);
  if (!e.total || *e.total > kPipelineCap) return std::nullopt;
  std::vector<Attribute> ranked;
  for (const auto& a : c.formulation.attributes)
    if (a.name == "o" || a.name == "c") ranked.push_back(a);
  const PerformanceTable table = build_performance_table(e.alternatives, ranked);
  std::vector<Relation> relations;
  std::vector<std::string> names;
  for (const auto& a : ranked) {
    relations.push_back(induced_relation(table, table.attribute_index(a.name), a));
    names.push_back(a.name);
  }
  Aggregator lex;
  lex.archetype = Archetype::lexicographic;
  if (c.instance.mode == CoverMode::max_cover) lex.importance_order = {"c", "o"};
  const Relation combined = apply_aggregator(lex, relations, names);
  const Partition p = solve_ranking(combined, {2, SolveMode::heuristic, kDefaultExactCap});
  std::vector<Alternative> top;
  for (const auto& id : p.classes().front())
    top.push_back(e.alternatives[combined.index_of(id)]);
  return top;
}

}  // namespace

bool CaseReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

std::string CaseReport::text() const {
  std::ostringstream os;
  for (const auto& l : lines) os << l << "\n";
  for (const auto& [name, pass] : checks) os << (pass ? "ok   " : "FAIL ") << name << "\n";
  return os.str();
}

CoveringCase build_covering_case(const CoveringInstance& instance) {
  instance.validate();
  const std::size_t n = instance.size();
  const bool max_cover = instance.mode == CoverMode::max_cover;
  CoveringCase c;
  c.instance = instance;
  c.rating_phases = n;
  auto& f = c.formulation;

  for (std::size_t j = 0; j < n; ++j) f.alternatives.variables.push_back({xname(j), Domain::binary()});
  if (max_cover)
    for (std::size_t j = 0; j < n; ++j) f.alternatives.variables.push_back({yname(j), Domain::binary()});

  for (std::size_t i = 0; i < n; ++i) {
    LinearConstraint lc;
    for (std::size_t j = 0; j < n; ++j)
      if (instance.gamma[i][j]) lc.coefficients[xname(j)] = 1;
    if (max_cover) lc.coefficients[yname(i)] = -1;
    lc.sense = Sense::ge;
    lc.rhs = max_cover ? 0 : 1;
    f.alternatives.feasibility.emplace_back(std::move(lc));
  }
  if (instance.budget) {
    LinearConstraint lc;
    for (std::size_t j = 0; j < n; ++j) lc.coefficients[xname(j)] = instance.cost(j);
    lc.sense = Sense::le;
    lc.rhs = *instance.budget;
    f.alternatives.feasibility.emplace_back(std::move(lc));
  }
  if (instance.target && max_cover) {
    LinearConstraint lc;
    for (std::size_t j = 0; j < n; ++j) lc.coefficients[yname(j)] = instance.population(j);
    lc.sense = Sense::ge;
    lc.rhs = *instance.target;
    f.alternatives.feasibility.emplace_back(std::move(lc));
  }

  for (std::size_t i = 0; i < n; ++i) {
    Attribute a;
    a.name = "cov" + std::to_string(i + 1);
    a.scale = Scale::ordinal;
    a.codomain.labels = {"uncovered", "covered"};
    if (max_cover) {
      a.evaluator = Expression(yname(i));
    } else {
      std::vector<std::string> terms;
      for (std::size_t j = 0; j < n; ++j)
        if (instance.gamma[i][j]) terms.push_back(xname(j));
      a.evaluator = Expression("min(1, " + join(terms, " + ") + ")");
    }
    f.attributes.push_back(std::move(a));
  }

  Attribute o;
  o.name = "o";
  o.scale = Scale::ratio;
  o.codomain.lo = 0;
  o.codomain.hi = static_cast<double>(n);
  o.direction = Direction::decreasing;
  Decomposition d;
  for (std::size_t j = 0; j < n; ++j) d.per_variable.emplace(xname(j), Expression("x"));
  d.function = AggregationFn::sum;
  o.decomposition = std::move(d);
  f.attributes.push_back(std::move(o));

  if (max_cover) {
    Attribute cov;
    cov.name = "c";
    cov.scale = Scale::ratio;
    cov.codomain.lo = 0;
    cov.codomain.hi = static_cast<double>(n);
    std::vector<std::string> terms;
    for (std::size_t j = 0; j < n; ++j) terms.push_back(yname(j));
    cov.evaluator = Expression(join(terms, " + "));
    f.attributes.push_back(std::move(cov));
  }

  f.statement.kind = StatementKind::ranking;
  f.statement.class_count = 2;
  return c;
}

CaseReport run_covering_case(const CoveringCase& c, CoverAlgorithm algorithm) {
  validate_formulation(c.formulation);
  const CoveringSolution s = optimize_covering(c.instance, algorithm);
  const std::size_t n = c.instance.size();
  CaseReport r;
  r.name = c.instance.mode == CoverMode::full_cover ? "covering" : "covering/max_cover";
  r.lines.push_back("districts=" + std::to_string(n));
  r.lines.push_back("variables=" + std::to_string(c.formulation.alternatives.variables.size()));
  r.lines.push_back("rating_phases=" + std::to_string(c.rating_phases));
  r.lines.push_back("openings=" + std::to_string(s.openings));
  r.lines.push_back("coverage=" + std::to_string(s.coverage));
  r.lines.push_back("open=" + format_openings(s));
  r.checks.emplace_back("rating phases = districts", c.rating_phases == n);
  if (c.instance.mode == CoverMode::full_cover) r.checks.emplace_back("every district covered", s.coverage == n);

  if (auto top = pipeline_top(c)) {
    const auto& f = c.formulation;
    const auto o = std::find_if(f.attributes.begin(), f.attributes.end(), [](const auto& a) { return a.name == "o"; });
    bool same = !top->empty();
    for (const auto& alt : *top) {
      same = same && evaluate_attribute(alt, *o) == static_cast<double>(s.openings);
      if (c.instance.mode == CoverMode::max_cover) {
        const auto cv = std::find_if(f.attributes.begin(), f.attributes.end(), [](const auto& a) { return a.name == "c"; });
        same = same && evaluate_attribute(alt, *cv) == static_cast<double>(s.coverage);
      }
    }
    r.lines.push_back("pipeline_top=" + std::to_string(top->size()));
    r.checks.emplace_back("solver agrees with the ranking pipeline", same);
  }
  return r;
}

AliceCase build_alice_case(const AliceParams& params, bool include_sw) {
  AliceCase c;
  c.params = params;
  c.include_sw = include_sw;
  c.actions = {"¬s", "s¬b", "sb"};
  if (include_sw) c.actions.push_back("sw");
  c.scenarios = {"a+", "a-", "¬a"};

  struct Scenario {
    std::string name;
    // Outcome labels, worst first, and the outcome of each action.
    std::vector<std::string> outcomes;
    std::map<std::string, std::string> of;
  };
  const std::vector<Scenario> scenarios = {
      {"a+",
       {"status quo", "reward R, ticket cost -T", "reward R, ticket cost -t - q", "reward R, ticket cost -t"},
       {{"¬s", "status quo"},
        {"s¬b", "reward R, ticket cost -T"},
        {"sw", "reward R, ticket cost -t - q"},
        {"sb", "reward R, ticket cost -t"}}},
      {"a-",
       {"accepted, cannot attend", "status quo", "reward R, ticket cost -t - q", "reward R, ticket cost -t"},
       {{"¬s", "status quo"},
        {"s¬b", "accepted, cannot attend"},
        {"sw", "reward R, ticket cost -t - q"},
        {"sb", "reward R, ticket cost -t"}}},
      {"¬a",
       {"ticket cost -t, no reward", "rejected, no cost", "booking fee -q, no reward", "status quo"},
       {{"¬s", "status quo"},
        {"s¬b", "rejected, no cost"},
        {"sw", "booking fee -q, no reward"},
        {"sb", "ticket cost -t, no reward"}}},
  };

  auto& f = c.formulation;
  f.alternatives.variables = {{"action", Domain::enumerated(c.actions)}};
  for (const auto& sc : scenarios) {
    Attribute a;
    a.name = sc.name;
    a.scale = Scale::ordinal;
    a.origin = Origin::scenario;
    a.codomain.labels = sc.outcomes;
    std::string expr = "lookup(action";
    for (const auto& act : c.actions) expr += ", " + quoted(act) + ", " + quoted(sc.of.at(act));
    a.evaluator = Expression(expr + ")");
    f.attributes.push_back(std::move(a));
  }
  f.statement.kind = StatementKind::ranking;

  if (include_sw) {
    c.expected = {{"a+", {"sb", "sw", "s¬b", "¬s"}}, {"a-", {"sb", "sw", "¬s", "s¬b"}}, {"¬a", {"¬s", "sw", "s¬b", "sb"}}};
  } else {
    c.expected = {{"a+", {"sb", "s¬b", "¬s"}}, {"a-", {"sb", "¬s", "s¬b"}}, {"¬a", {"¬s", "s¬b", "sb"}}};
  }
  return c;
}

Aggregator alice_default_aggregator() {
  Aggregator a;
  a.archetype = Archetype::lexicographic;
  a.importance_order = {"¬a", "a-", "a+"};
  return a;
}

CaseReport run_alice_case(const AliceCase& c, const Aggregator& aggregator) {
  validate_formulation(c.formulation);
  std::vector<Alternative> alts;
  for_each_alternative(c.formulation.alternatives, [&](const Alternative& a) {
    alts.push_back(a);
    return true;
  });
  const PerformanceTable table = build_performance_table(alts, c.formulation.attributes);

  CaseReport r;
  r.name = c.include_sw ? "alice/sw" : "alice";
  std::vector<Relation> relations;
  std::vector<std::string> names;
  bool all_linear = true, sw_second = c.include_sw;
  for (const auto& a : c.formulation.attributes) {
    Relation rel = induced_relation(table, table.attribute_index(a.name), a);
    const Partition p = levels_partition(rel);
    const std::string rendered = render_order(p);
    r.orders.emplace_back(a.name, rendered);
    r.lines.push_back(a.name + ": " + rendered);
    all_linear = all_linear && check_properties(rel).total_preorder &&
                 std::all_of(p.classes().begin(), p.classes().end(), [](const auto& k) { return k.size() == 1; });
    r.checks.emplace_back(a.name + " order as expected", rendered == join(c.expected.at(a.name), " ≻ "));
    if (c.include_sw) {
      const auto sw = p.class_of(ElementId("sw"));
      std::size_t above = 0;
      for (std::size_t k = 0; sw && k < *sw; ++k) above += p.classes()[k].size();
      sw_second = sw_second && sw && above == 1;
    }
    relations.push_back(std::move(rel));
    names.push_back(a.name);
  }
  r.checks.emplace_back("scenario orders are linear", all_linear);
  if (c.include_sw) r.checks.emplace_back("sw second in every scenario", sw_second);

  const Relation combined = apply_aggregator(aggregator, relations, names);
  r.aggregate = levels_partition(combined);
  r.lines.push_back("aggregate (" + std::string(to_string(aggregator.archetype)) + "): " + render_order(*r.aggregate));
  if (aggregator == alice_default_aggregator() && !c.include_sw) {
    const auto& top = r.aggregate->classes().front();
    r.checks.emplace_back("top action is ¬s", top.size() == 1 && top.front().str() == "¬s");
  }
  return r;
}

}  // namespace dp
