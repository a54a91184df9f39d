#include "dp/formulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <set>

namespace dp {

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}
std::map<std::string, PredicateFn>& predicates() {
  static std::map<std::string, PredicateFn> r;
  return r;
}
std::map<std::string, CustomAggregationFn>& aggregations() {
  static std::map<std::string, CustomAggregationFn> r;
  return r;
}

std::string format_number(double v) {
  char buf[64];
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(v));
    return std::string(buf, p);
  }
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

void register_predicate(const std::string& name, PredicateFn fn) {
  std::lock_guard lock(registry_mutex());
  predicates()[name] = std::move(fn);
}

void register_aggregation(const std::string& name, CustomAggregationFn fn) {
  std::lock_guard lock(registry_mutex());
  aggregations()[name] = std::move(fn);
}

std::uint64_t Domain::cardinality() const {
  switch (type) {
    case Type::binary: return 2;
    case Type::integer_range: return static_cast<std::uint64_t>(hi - lo) + 1;
    case Type::labels: return labels.size();
    case Type::real_interval: return 0;
  }
  return 0;
}

double Domain::value_at(std::uint64_t k) const {
  return type == Type::integer_range ? lo + static_cast<double>(k) : static_cast<double>(k);
}

bool Domain::contains(double v) const {
  switch (type) {
    case Type::binary: return v == 0.0 || v == 1.0;
    case Type::integer_range: return v == std::floor(v) && v >= lo && v <= hi;
    case Type::real_interval: return v >= lo && v <= hi;
    case Type::labels: return v == std::floor(v) && v >= 0 && v < static_cast<double>(labels.size());
  }
  return false;
}

std::optional<double> Domain::code_of(std::string_view label) const {
  if (type != Type::labels) return std::nullopt;
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<double>(it - labels.begin());
}

std::string Domain::describe(double v) const {
  if (type == Type::labels && contains(v)) return labels[static_cast<std::size_t>(v)];
  return format_number(v);
}

void Domain::validate(const std::string& owner) const {
  auto bad = [&](const std::string& why) { throw Error(ErrorCode::InvalidFormulation, owner + ": " + why); };
  switch (type) {
    case Type::binary: break;
    case Type::integer_range:
      if (lo != std::floor(lo) || hi != std::floor(hi)) bad("integer range bounds must be integral");
      [[fallthrough]];
    case Type::real_interval:
      if (!(lo <= hi)) bad("empty range");
      break;
    case Type::labels: {
      if (labels.empty()) bad("empty label list");
      std::set<std::string> seen(labels.begin(), labels.end());
      if (seen.size() != labels.size()) bad("duplicate labels");
      break;
    }
  }
}

std::optional<double> Codomain::code_of(std::string_view label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<double>(it - labels.begin());
}

Alternative::Alternative(std::shared_ptr<const std::vector<Variable>> variables, std::vector<double> values,
                         std::string id)
    : variables_(std::move(variables)), values_(std::move(values)), id_(std::move(id)) {
  if (!variables_ || variables_->size() != values_.size())
    throw Error(ErrorCode::InvalidFormulation, "alternative must assign every variable exactly once");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!(*variables_)[i].domain.contains(values_[i]))
      throw Error(ErrorCode::InvalidFormulation, "value out of domain for '" + (*variables_)[i].name + "'");
  if (id_.empty()) id_ = alternative_id(*variables_, values_);
}

std::optional<double> Alternative::value(std::string_view name) const {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if ((*variables_)[i].name == name) return values_[i];
  return std::nullopt;
}

ExpressionContext Alternative::context() const {
  ExpressionContext ctx;
  ctx.value = [this](std::string_view name) { return value(name); };
  ctx.label_code = [this](std::string_view name, std::string_view label) -> std::optional<double> {
    for (const auto& v : *variables_)
      if (v.name == name) return v.domain.code_of(label);
    return std::nullopt;
  };
  return ctx;
}

std::string alternative_id(const std::vector<Variable>& variables, std::span<const double> values) {
  if (variables.size() == 1) return variables[0].domain.describe(values[0]);
  std::string out;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (i) out += ',';
    out += variables[i].name + '=' + variables[i].domain.describe(values[i]);
  }
  return out;
}

bool AlternativeSet::feasible(const Alternative& alt) const {
  for (const auto& pred : feasibility) {
    if (const auto* lin = std::get_if<LinearConstraint>(&pred)) {
      double lhs = 0;
      for (const auto& [name, coef] : lin->coefficients) {
        auto v = alt.value(name);
        if (!v) throw Error(ErrorCode::UnknownReference, "constraint references '" + name + "'");
        lhs += coef * *v;
      }
      constexpr double eps = 1e-9;
      bool ok = lin->sense == Sense::le   ? lhs <= lin->rhs + eps
                : lin->sense == Sense::ge ? lhs >= lin->rhs - eps
                                          : std::fabs(lhs - lin->rhs) <= eps;
      if (!ok) return false;
    } else {
      const auto& ext = std::get<ExtensionPredicate>(pred);
      PredicateFn fn;
      {
        std::lock_guard lock(registry_mutex());
        auto it = predicates().find(ext.name);
        if (it == predicates().end())
          throw Error(ErrorCode::UnknownReference, "no extension predicate '" + ext.name + "'");
        fn = it->second;
      }
      if (!fn(alt)) return false;
    }
  }
  return true;
}

std::shared_ptr<const std::vector<Variable>> AlternativeSet::shared_variables() const {
  return std::make_shared<const std::vector<Variable>>(variables);
}

Alternative AlternativeSet::make(std::span<const double> values, std::string id) const {
  return Alternative(shared_variables(), std::vector<double>(values.begin(), values.end()), std::move(id));
}

Alternative AlternativeSet::make(const ExplicitMember& member) const {
  std::vector<double> values;
  values.reserve(variables.size());
  for (const auto& v : variables) {
    auto it = member.assignment.find(v.name);
    if (it == member.assignment.end())
      throw Error(ErrorCode::InvalidFormulation, "member '" + member.id + "' leaves '" + v.name + "' unassigned");
    values.push_back(it->second);
  }
  if (member.assignment.size() != variables.size())
    throw Error(ErrorCode::InvalidFormulation, "member '" + member.id + "' assigns unknown variables");
  return Alternative(shared_variables(), std::move(values), member.id);
}

std::string_view to_string(StatementKind k) {
  switch (k) {
    case StatementKind::ranking: return "ranking";
    case StatementKind::rating: return "rating";
    case StatementKind::clustering: return "clustering";
    case StatementKind::assignment: return "assignment";
  }
  return "?";
}

std::string_view to_string(Scale s) {
  switch (s) {
    case Scale::nominal: return "nominal";
    case Scale::ordinal: return "ordinal";
    case Scale::interval: return "interval";
    case Scale::ratio: return "ratio";
  }
  return "?";
}

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::value: return "value";
    case Origin::opinion: return "opinion";
    case Origin::scenario: return "scenario";
  }
  return "?";
}

StatementKind classify_problem_statement(bool ordered_classes, Comparison comparison) {
  if (ordered_classes)
    return comparison == Comparison::relative ? StatementKind::ranking : StatementKind::rating;
  return comparison == Comparison::relative ? StatementKind::clustering : StatementKind::assignment;
}

Diagnostics validate_formulation(const ProblemFormulation& f) {
  Diagnostics d;
  std::set<std::string> variables;
  for (const auto& v : f.alternatives.variables) {
    v.domain.validate("variable '" + v.name + "'");
    if (!variables.insert(v.name).second)
      throw Error(ErrorCode::InvalidFormulation, "duplicate variable '" + v.name + "'");
  }
  std::set<std::string> attributes;
  bool any_separable = false;
  for (const auto& a : f.attributes) {
    if (!attributes.insert(a.name).second)
      throw Error(ErrorCode::InvalidFormulation, "duplicate attribute '" + a.name + "'");
    any_separable = any_separable || a.separable;
    if (a.evaluator)
      for (const auto& id : a.evaluator->identifiers())
        if (!variables.count(id))
          throw Error(ErrorCode::UnknownReference, "attribute '" + a.name + "' evaluator uses '" + id + "'");
    if (a.decomposition) {
      for (const auto& [var, expr] : a.decomposition->per_variable) {
        if (!variables.count(var))
          throw Error(ErrorCode::UnknownReference, "attribute '" + a.name + "' decomposes over '" + var + "'");
        for (const auto& id : expr.identifiers())
          if (id != "x" && !variables.count(id))
            throw Error(ErrorCode::UnknownReference, "attribute '" + a.name + "' sub-evaluator uses '" + id + "'");
      }
      if (a.scale == Scale::nominal && a.decomposition->function != AggregationFn::custom)
        d.notes.push_back("attribute '" + a.name + "' is nominal; its decomposition cannot aggregate");
    }
    if (!a.evaluator && !a.decomposition)
      d.notes.push_back("attribute '" + a.name + "' has no evaluator; preferences must be elicited");
  }
  if (!any_separable)
    throw Error(ErrorCode::NoDecisionProblem, "no separable attribute describes the alternatives");

  const auto& st = f.statement;
  if (st.class_count && *st.class_count < 2)
    throw Error(ErrorCode::InvalidFormulation, "class_count must be at least 2");
  if ((st.kind == StatementKind::rating || st.kind == StatementKind::assignment) &&
      (!st.norms || st.norms->levels.empty()))
    throw Error(ErrorCode::MissingNorms, std::string(to_string(st.kind)) + " compares against norms");
  if (st.norms)
    for (const auto& level : st.norms->levels)
      for (const auto& [attr, threshold] : level.thresholds)
        if (!attributes.count(attr))
          throw Error(ErrorCode::UnknownReference, "norm '" + level.id + "' references '" + attr + "'");
  if (st.kind == StatementKind::ranking && st.class_count == 2u) {
    d.choice = true;
    d.notes.push_back("choice: ranking with two classes");
  }
  d.ok = true;
  return d;
}

void for_each_alternative(const AlternativeSet& set, const std::function<bool(const Alternative&)>& visit) {
  auto shared = set.shared_variables();
  if (set.explicit_members) {
    for (const auto& m : *set.explicit_members) {
      Alternative alt = set.make(m);
      if (!set.feasible(alt))
        throw Error(ErrorCode::InvalidFormulation, "explicit member '" + m.id + "' is infeasible");
      if (!visit(alt)) return;
    }
    return;
  }
  for (const auto& v : set.variables)
    if (!v.domain.finite())
      throw Error(ErrorCode::NotEnumerable, "variable '" + v.name + "' has an infinite domain");
  const std::size_t n = set.variables.size();
  std::vector<std::uint64_t> digit(n, 0);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = set.variables[i].domain.value_at(0);
  while (true) {
    Alternative alt(shared, values);
    if (set.feasible(alt) && !visit(alt)) return;
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++digit[i] < set.variables[i].domain.cardinality()) {
        values[i] = set.variables[i].domain.value_at(digit[i]);
        break;
      }
      digit[i] = 0;
      values[i] = set.variables[i].domain.value_at(0);
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

Enumeration enumerate_alternatives(const AlternativeSet& set, std::size_t limit, std::uint64_t cap) {
  Enumeration out;
  std::uint64_t product = 1;
  bool bounded = true;
  if (set.explicit_members) {
    product = set.explicit_members->size();
  } else {
    for (const auto& v : set.variables) {
      if (!v.domain.finite())
        throw Error(ErrorCode::NotEnumerable, "variable '" + v.name + "' has an infinite domain");
      const std::uint64_t c = v.domain.cardinality();
      if (!bounded || product > cap * 2 || c > cap * 2)
        bounded = false;
      else
        product *= c;
    }
  }
  const bool countable = bounded && product <= cap;
  const bool arithmetic = countable && set.feasibility.empty() && !set.explicit_members;
  std::uint64_t count = 0;
  for_each_alternative(set, [&](const Alternative& alt) {
    ++count;
    if (out.alternatives.size() < limit) out.alternatives.push_back(alt);
    return countable && !arithmetic ? true : out.alternatives.size() < limit;
  });
  if (arithmetic)
    out.total = product;
  else if (countable)
    out.total = count;
  return out;
}

double evaluate_attribute(const Alternative& alt, const Attribute& attr) {
  if (!attr.evaluator) {
    if (attr.decomposition) return evaluate_decomposed(alt, attr);
    throw Error(ErrorCode::EvaluationFailure, "attribute '" + attr.name + "' has no evaluator");
  }
  ExpressionContext ctx = alt.context();
  ctx.result_code = [&attr](std::string_view label) { return attr.codomain.code_of(label); };
  double v = attr.evaluator->evaluate(ctx);
  if (!attr.codomain.numeric() &&
      (v != std::floor(v) || v < 0 || v >= static_cast<double>(attr.codomain.labels.size())))
    throw Error(ErrorCode::EvaluationFailure, "attribute '" + attr.name + "' produced a value outside its codomain");
  return v;
}

std::vector<double> evaluate(const Alternative& alt, std::span<const Attribute> attributes) {
  std::vector<double> out;
  out.reserve(attributes.size());
  for (const auto& a : attributes) out.push_back(evaluate_attribute(alt, a));
  return out;
}

double evaluate_decomposed(const Alternative& alt, const Attribute& attr) {
  if (!attr.decomposition) throw Error(ErrorCode::NoDecomposition, "attribute '" + attr.name + "'");
  const Decomposition& dec = *attr.decomposition;
  if (attr.scale == Scale::nominal && dec.function != AggregationFn::custom)
    throw Error(ErrorCode::NotAggregable,
                "nominal attribute '" + attr.name + "' has no order to sum, min or max over");
  // Sub-evaluations run over the bundle: variables with a non-zero value.
  std::vector<double> parts;
  for (const auto& [var, expr] : dec.per_variable) {
    auto x = alt.value(var);
    if (!x) throw Error(ErrorCode::EvaluationFailure, "no variable '" + var + "'");
    if (*x == 0.0) continue;
    ExpressionContext ctx = alt.context();
    auto outer = ctx.value;
    double xv = *x;
    ctx.value = [outer, xv](std::string_view name) -> std::optional<double> {
      if (name == "x") return xv;
      return outer(name);
    };
    parts.push_back(expr.evaluate(ctx));
  }
  switch (dec.function) {
    case AggregationFn::sum: {
      double s = 0;
      for (double p : parts) s += p;
      return s;
    }
    case AggregationFn::min:
    case AggregationFn::max:
      if (parts.empty())
        throw Error(ErrorCode::EvaluationFailure, "min/max over an empty bundle for '" + attr.name + "'");
      return dec.function == AggregationFn::min ? *std::min_element(parts.begin(), parts.end())
                                                : *std::max_element(parts.begin(), parts.end());
    case AggregationFn::custom: {
      CustomAggregationFn fn;
      {
        std::lock_guard lock(registry_mutex());
        auto it = aggregations().find(dec.custom_name);
        if (it == aggregations().end())
          throw Error(ErrorCode::UnknownReference, "no aggregation function '" + dec.custom_name + "'");
        fn = it->second;
      }
      return fn(parts);
    }
  }
  return 0;
}

std::string describe_value(const Attribute& attr, double value) {
  if (!attr.codomain.numeric() && value >= 0 && value < static_cast<double>(attr.codomain.labels.size()) &&
      value == std::floor(value))
    return attr.codomain.labels[static_cast<std::size_t>(value)];
  return format_number(value);
}

std::size_t PerformanceTable::attribute_index(std::string_view name) const {
  auto it = std::find(attributes.begin(), attributes.end(), name);
  if (it == attributes.end()) throw Error(ErrorCode::UnknownReference, "no attribute '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - attributes.begin());
}

PerformanceTable build_performance_table(std::span<const Alternative> alternatives,
                                         std::span<const Attribute> attributes) {
  PerformanceTable t;
  std::vector<const Attribute*> used;
  for (const auto& a : attributes)
    if (a.evaluator || a.decomposition) {
      used.push_back(&a);
      t.attributes.push_back(a.name);
    }
  t.values.reserve(alternatives.size() * used.size());
  for (const auto& alt : alternatives) {
    t.carrier.emplace_back(alt.id());
    for (const Attribute* a : used) t.values.push_back(evaluate_attribute(alt, *a));
  }
  return t;
}

Relation induced_relation(const PerformanceTable& table, std::size_t column, const Attribute& attr) {
  Relation r(table.carrier);
  const std::size_t n = table.carrier.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = table.at(i, column), b = table.at(j, column);
      bool holds = attr.scale == Scale::nominal         ? a == b
                   : attr.direction == Direction::increasing ? a >= b
                                                             : a <= b;
      if (holds) r.set(i, j);
    }
  return r;
}

}  // namespace dp
