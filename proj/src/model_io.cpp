#include "dp/model_io.hpp"

#include <fstream>
#include <sstream>

namespace dp {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::ParseError, (path.empty() ? "/" : path) + ": " + why);
}

std::string at_key(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at_index(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) parse_fail(at_key(path, key), "missing");
  return *it;
}

const Json* optional_field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) parse_fail(path, "expected a string");
  return j.get<std::string>();
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  return j.get<double>();
}

bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) parse_fail(path, "expected a boolean");
  return j.get<bool>();
}

std::size_t as_count(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    parse_fail(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

const Json& as_array(const Json& j, const std::string& path) {
  if (!j.is_array()) parse_fail(path, "expected an array");
  return j;
}

std::vector<std::string> string_list(const Json& j, const std::string& path) {
  std::vector<std::string> out;
  const Json& a = as_array(j, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_string(a[i], at_index(path, i)));
  return out;
}

std::vector<ElementId> id_list(const Json& j, const std::string& path) {
  std::vector<ElementId> out;
  for (const auto& s : string_list(j, path)) {
    if (s.empty()) parse_fail(path, "empty element id");
    out.emplace_back(s);
  }
  return out;
}

std::vector<double> number_list(const Json& j, const std::string& path) {
  std::vector<double> out;
  const Json& a = as_array(j, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_number(a[i], at_index(path, i)));
  return out;
}

template <typename E, std::size_t N>
E parse_enum(const Json& j, const std::string& path, const std::pair<const char*, E> (&table)[N]) {
  const std::string s = as_string(j, path);
  for (const auto& [name, value] : table)
    if (s == name) return value;
  parse_fail(path, "unknown value '" + s + "'");
}

template <typename E, std::size_t N>
const char* enum_name(E value, const std::pair<const char*, E> (&table)[N]) {
  for (const auto& [name, v] : table)
    if (v == value) return name;
  return "?";
}

constexpr std::pair<const char*, RelationKind> kRelationKinds[] = {
    {"relative", RelationKind::relative}, {"absolute", RelationKind::absolute}, {"second_order", RelationKind::second_order}};
constexpr std::pair<const char*, Scale> kScales[] = {
    {"nominal", Scale::nominal}, {"ordinal", Scale::ordinal}, {"interval", Scale::interval}, {"ratio", Scale::ratio}};
constexpr std::pair<const char*, Origin> kOrigins[] = {
    {"value", Origin::value}, {"opinion", Origin::opinion}, {"scenario", Origin::scenario}};
constexpr std::pair<const char*, Direction> kDirections[] = {
    {"increasing", Direction::increasing}, {"decreasing", Direction::decreasing}};
constexpr std::pair<const char*, AggregationFn> kFunctions[] = {
    {"sum", AggregationFn::sum}, {"min", AggregationFn::min}, {"max", AggregationFn::max}, {"custom", AggregationFn::custom}};
constexpr std::pair<const char*, StatementKind> kKinds[] = {{"ranking", StatementKind::ranking},
                                                            {"rating", StatementKind::rating},
                                                            {"clustering", StatementKind::clustering},
                                                            {"assignment", StatementKind::assignment}};
constexpr std::pair<const char*, Sense> kSenses[] = {{"le", Sense::le}, {"ge", Sense::ge}, {"eq", Sense::eq}};
constexpr std::pair<const char*, Domain::Type> kDomains[] = {{"binary", Domain::Type::binary},
                                                             {"integer", Domain::Type::integer_range},
                                                             {"real", Domain::Type::real_interval},
                                                             {"labels", Domain::Type::labels}};
constexpr std::pair<const char*, PreferenceKind> kPreferenceKinds[] = {
    {"first_order_relative", PreferenceKind::first_order_relative},
    {"first_order_absolute", PreferenceKind::first_order_absolute},
    {"extended", PreferenceKind::extended},
    {"intensity", PreferenceKind::intensity},
    {"multi_attribute", PreferenceKind::multi_attribute},
    {"second_order", PreferenceKind::second_order}};
constexpr std::pair<const char*, Comparator> kComparators[] = {
    {"weak", Comparator::weak}, {"strict", Comparator::strict}, {"indifferent", Comparator::indifferent}};
constexpr std::pair<const char*, Polarity> kPolarities[] = {{"positive", Polarity::positive},
                                                            {"explicit_negative", Polarity::explicit_negative}};
constexpr std::pair<const char*, Archetype> kArchetypes[] = {{"weighted_functional", Archetype::weighted_functional},
                                                             {"majority_relational", Archetype::majority_relational},
                                                             {"lexicographic", Archetype::lexicographic},
                                                             {"veto_majority", Archetype::veto_majority}};
constexpr std::pair<const char*, CoverMode> kCoverModes[] = {{"full_cover", CoverMode::full_cover},
                                                             {"max_cover", CoverMode::max_cover}};

Json pair_json(const ElementPair& p) { return Json::array({p.first.str(), p.second.str()}); }

ElementPair pair_from(const Json& j, const std::string& path) {
  const auto v = id_list(j, path);
  if (v.size() != 2) parse_fail(path, "expected a pair");
  return {v[0], v[1]};
}

template <typename T>
T wrap(const std::string& path, const std::function<T()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    parse_fail(path, e.what());
  }
}

}  // namespace

Json to_json(const Relation& r) {
  Json j{{"carrier", Json::array()}, {"kind", enum_name(r.kind(), kRelationKinds)}, {"pairs", Json::array()}};
  for (const auto& e : r.carrier()) j["carrier"].push_back(e.str());
  if (!r.norms().empty()) {
    j["norms"] = Json::array();
    for (const auto& e : r.norms()) j["norms"].push_back(e.str());
  }
  for (const auto& p : r.pairs()) j["pairs"].push_back(pair_json(p));
  return j;
}

Relation relation_from_json(const Json& j, const std::string& path) {
  auto carrier = id_list(field(j, "carrier", path), at_key(path, "carrier"));
  RelationKind kind = RelationKind::relative;
  if (auto* k = optional_field(j, "kind", path)) kind = parse_enum(*k, at_key(path, "kind"), kRelationKinds);
  std::vector<ElementId> norms;
  if (auto* n = optional_field(j, "norms", path)) norms = id_list(*n, at_key(path, "norms"));
  std::vector<ElementPair> pairs;
  const std::string pp = at_key(path, "pairs");
  const Json& a = as_array(field(j, "pairs", path), pp);
  for (std::size_t i = 0; i < a.size(); ++i) pairs.push_back(pair_from(a[i], at_index(pp, i)));
  return wrap<Relation>(path, [&] { return Relation::from_pairs(carrier, pairs, kind, norms); });
}

Json to_json(const Partition& p) {
  Json j{{"classes", Json::array()}, {"ordered", p.ordered()}};
  for (const auto& c : p.classes()) {
    Json cls = Json::array();
    for (const auto& e : c) cls.push_back(e.str());
    j["classes"].push_back(std::move(cls));
  }
  if (!p.labels().empty()) j["labels"] = p.labels();
  return j;
}

Partition partition_from_json(const Json& j, const std::string& path) {
  std::vector<std::vector<ElementId>> classes;
  const std::string cp = at_key(path, "classes");
  const Json& a = as_array(field(j, "classes", path), cp);
  for (std::size_t i = 0; i < a.size(); ++i) classes.push_back(id_list(a[i], at_index(cp, i)));
  const bool ordered = as_bool(field(j, "ordered", path), at_key(path, "ordered"));
  std::vector<std::string> labels;
  if (auto* l = optional_field(j, "labels", path)) labels = string_list(*l, at_key(path, "labels"));
  return wrap<Partition>(path, [&] { return Partition(classes, ordered, labels); });
}

Json to_json(const Domain& d) {
  Json j{{"type", enum_name(d.type, kDomains)}};
  if (d.type == Domain::Type::integer_range || d.type == Domain::Type::real_interval) {
    j["lo"] = d.lo;
    j["hi"] = d.hi;
  }
  if (d.type == Domain::Type::labels) j["labels"] = d.labels;
  return j;
}

Domain domain_from_json(const Json& j, const std::string& path) {
  const auto type = parse_enum(field(j, "type", path), at_key(path, "type"), kDomains);
  Domain d;
  switch (type) {
    case Domain::Type::binary:
      d = Domain::binary();
      break;
    case Domain::Type::integer_range:
    case Domain::Type::real_interval: {
      const double lo = as_number(field(j, "lo", path), at_key(path, "lo"));
      const double hi = as_number(field(j, "hi", path), at_key(path, "hi"));
      d = type == Domain::Type::real_interval ? Domain::real_interval(lo, hi) : Domain{type, lo, hi, {}};
      break;
    }
    case Domain::Type::labels:
      d = Domain::enumerated(string_list(field(j, "labels", path), at_key(path, "labels")));
      break;
  }
  wrap<int>(path, [&] {
    d.validate("domain");
    return 0;
  });
  return d;
}

Json to_json(const Variable& v) { return {{"name", v.name}, {"domain", to_json(v.domain)}}; }

Variable variable_from_json(const Json& j, const std::string& path) {
  Variable v{as_string(field(j, "name", path), at_key(path, "name")),
             domain_from_json(field(j, "domain", path), at_key(path, "domain"))};
  if (v.name.empty()) parse_fail(at_key(path, "name"), "empty name");
  return v;
}

Json to_json(const Attribute& a) {
  Json j{{"name", a.name},
         {"scale", enum_name(a.scale, kScales)},
         {"origin", enum_name(a.origin, kOrigins)},
         {"separable", a.separable},
         {"direction", enum_name(a.direction, kDirections)}};
  if (a.codomain.numeric())
    j["codomain"] = {{"lo", a.codomain.lo}, {"hi", a.codomain.hi}};
  else
    j["codomain"] = {{"labels", a.codomain.labels}};
  if (a.evaluator) j["evaluator"] = a.evaluator->source();
  if (a.decomposition) {
    Json d{{"function", enum_name(a.decomposition->function, kFunctions)}, {"per_variable", Json::object()}};
    for (const auto& [var, expr] : a.decomposition->per_variable) d["per_variable"][var] = expr.source();
    if (!a.decomposition->custom_name.empty()) d["custom"] = a.decomposition->custom_name;
    j["decomposition"] = std::move(d);
  }
  return j;
}

Attribute attribute_from_json(const Json& j, const std::string& path) {
  Attribute a;
  a.name = as_string(field(j, "name", path), at_key(path, "name"));
  if (a.name.empty()) parse_fail(at_key(path, "name"), "empty name");
  if (auto* s = optional_field(j, "scale", path)) a.scale = parse_enum(*s, at_key(path, "scale"), kScales);
  if (auto* o = optional_field(j, "origin", path)) a.origin = parse_enum(*o, at_key(path, "origin"), kOrigins);
  if (auto* s = optional_field(j, "separable", path)) a.separable = as_bool(*s, at_key(path, "separable"));
  if (auto* d = optional_field(j, "direction", path)) a.direction = parse_enum(*d, at_key(path, "direction"), kDirections);
  const std::string cp = at_key(path, "codomain");
  if (auto* c = optional_field(j, "codomain", path)) {
    if (auto* labels = optional_field(*c, "labels", cp)) {
      a.codomain.labels = string_list(*labels, at_key(cp, "labels"));
    } else {
      a.codomain.lo = as_number(field(*c, "lo", cp), at_key(cp, "lo"));
      a.codomain.hi = as_number(field(*c, "hi", cp), at_key(cp, "hi"));
    }
  }
  const std::string ep = at_key(path, "evaluator");
  if (auto* e = optional_field(j, "evaluator", path))
    a.evaluator = wrap<Expression>(ep, [&] { return Expression(as_string(*e, ep)); });
  if (auto* d = optional_field(j, "decomposition", path)) {
    const std::string dp = at_key(path, "decomposition");
    Decomposition dec;
    if (auto* f = optional_field(*d, "function", dp)) dec.function = parse_enum(*f, at_key(dp, "function"), kFunctions);
    if (auto* c = optional_field(*d, "custom", dp)) dec.custom_name = as_string(*c, at_key(dp, "custom"));
    const std::string pp = at_key(dp, "per_variable");
    const Json& per = field(*d, "per_variable", dp);
    if (!per.is_object()) parse_fail(pp, "expected an object");
    for (const auto& [var, expr] : per.items()) {
      const std::string vp = at_key(pp, var);
      dec.per_variable.emplace(var, wrap<Expression>(vp, [&] { return Expression(as_string(expr, vp)); }));
    }
    a.decomposition = std::move(dec);
  }
  return a;
}

Json to_json(const AlternativeSet& s) {
  Json j{{"variables", Json::array()}, {"constraints", Json::array()}};
  for (const auto& v : s.variables) j["variables"].push_back(to_json(v));
  for (const auto& c : s.feasibility) {
    if (const auto* lin = std::get_if<LinearConstraint>(&c))
      j["constraints"].push_back(
          {{"coefficients", lin->coefficients}, {"sense", enum_name(lin->sense, kSenses)}, {"rhs", lin->rhs}});
    else
      j["constraints"].push_back({{"predicate", std::get<ExtensionPredicate>(c).name}});
  }
  if (s.explicit_members) {
    j["members"] = Json::array();
    for (const auto& m : *s.explicit_members) {
      Json assignment = Json::object();
      for (const auto& v : s.variables) {
        auto it = m.assignment.find(v.name);
        if (it == m.assignment.end()) continue;
        if (v.domain.type == Domain::Type::labels)
          assignment[v.name] = v.domain.describe(it->second);
        else
          assignment[v.name] = it->second;
      }
      j["members"].push_back({{"id", m.id}, {"assignment", std::move(assignment)}});
    }
  }
  return j;
}

AlternativeSet alternative_set_from_json(const Json& j, const std::string& path) {
  AlternativeSet s;
  const std::string vp = at_key(path, "variables");
  const Json& vars = as_array(field(j, "variables", path), vp);
  for (std::size_t i = 0; i < vars.size(); ++i) s.variables.push_back(variable_from_json(vars[i], at_index(vp, i)));
  if (auto* cs = optional_field(j, "constraints", path)) {
    const std::string cp = at_key(path, "constraints");
    as_array(*cs, cp);
    for (std::size_t i = 0; i < cs->size(); ++i) {
      const Json& c = (*cs)[i];
      const std::string ip = at_index(cp, i);
      if (auto* p = optional_field(c, "predicate", ip)) {
        s.feasibility.emplace_back(ExtensionPredicate{as_string(*p, at_key(ip, "predicate"))});
        continue;
      }
      LinearConstraint lin;
      const Json& coef = field(c, "coefficients", ip);
      if (!coef.is_object()) parse_fail(at_key(ip, "coefficients"), "expected an object");
      for (const auto& [name, value] : coef.items())
        lin.coefficients[name] = as_number(value, at_key(at_key(ip, "coefficients"), name));
      lin.sense = parse_enum(field(c, "sense", ip), at_key(ip, "sense"), kSenses);
      lin.rhs = as_number(field(c, "rhs", ip), at_key(ip, "rhs"));
      s.feasibility.emplace_back(std::move(lin));
    }
  }
  if (auto* ms = optional_field(j, "members", path)) {
    const std::string mp = at_key(path, "members");
    as_array(*ms, mp);
    std::vector<ExplicitMember> members;
    for (std::size_t i = 0; i < ms->size(); ++i) {
      const std::string ip = at_index(mp, i);
      ExplicitMember m;
      m.id = as_string(field((*ms)[i], "id", ip), at_key(ip, "id"));
      const std::string ap = at_key(ip, "assignment");
      const Json& asg = field((*ms)[i], "assignment", ip);
      if (!asg.is_object()) parse_fail(ap, "expected an object");
      for (const auto& [name, value] : asg.items()) {
        const Variable* var = nullptr;
        for (const auto& v : s.variables)
          if (v.name == name) var = &v;
        if (!var) parse_fail(at_key(ap, name), "unknown variable");
        if (value.is_string()) {
          auto code = var->domain.code_of(value.get<std::string>());
          if (!code) parse_fail(at_key(ap, name), "unknown label");
          m.assignment[name] = *code;
        } else {
          m.assignment[name] = as_number(value, at_key(ap, name));
        }
      }
      members.push_back(std::move(m));
    }
    s.explicit_members = std::move(members);
  }
  return s;
}

Json to_json(const ProblemStatement& s) {
  Json j{{"kind", enum_name(s.kind, kKinds)}};
  if (s.class_count) j["class_count"] = *s.class_count;
  if (s.class_cardinalities) j["class_cardinalities"] = *s.class_cardinalities;
  if (s.norms) {
    Json levels = Json::array();
    for (const auto& l : s.norms->levels) levels.push_back({{"id", l.id}, {"thresholds", l.thresholds}});
    j["norms"] = {{"name", s.norms->name}, {"levels", std::move(levels)}};
  }
  return j;
}

ProblemStatement statement_from_json(const Json& j, const std::string& path) {
  ProblemStatement s;
  s.kind = parse_enum(field(j, "kind", path), at_key(path, "kind"), kKinds);
  if (auto* c = optional_field(j, "class_count", path)) s.class_count = as_count(*c, at_key(path, "class_count"));
  if (auto* c = optional_field(j, "class_cardinalities", path)) {
    std::vector<std::size_t> v;
    const std::string cp = at_key(path, "class_cardinalities");
    as_array(*c, cp);
    for (std::size_t i = 0; i < c->size(); ++i) v.push_back(as_count((*c)[i], at_index(cp, i)));
    s.class_cardinalities = std::move(v);
  }
  if (auto* n = optional_field(j, "norms", path)) {
    const std::string np = at_key(path, "norms");
    NormSet norms;
    if (auto* name = optional_field(*n, "name", np)) norms.name = as_string(*name, at_key(np, "name"));
    const std::string lp = at_key(np, "levels");
    const Json& levels = as_array(field(*n, "levels", np), lp);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const std::string ip = at_index(lp, i);
      NormLevel level;
      level.id = as_string(field(levels[i], "id", ip), at_key(ip, "id"));
      if (auto* th = optional_field(levels[i], "thresholds", ip)) {
        if (!th->is_object()) parse_fail(at_key(ip, "thresholds"), "expected an object");
        for (const auto& [attr, value] : th->items())
          level.thresholds[attr] = as_number(value, at_key(at_key(ip, "thresholds"), attr));
      }
      norms.levels.push_back(std::move(level));
    }
    s.norms = std::move(norms);
  }
  return s;
}

Json to_json(const ProblemFormulation& f) {
  Json attrs = Json::array();
  for (const auto& a : f.attributes) attrs.push_back(to_json(a));
  return {{"alternatives", to_json(f.alternatives)}, {"attributes", std::move(attrs)}, {"statement", to_json(f.statement)}};
}

ProblemFormulation formulation_from_json(const Json& j, const std::string& path) {
  ProblemFormulation f;
  f.alternatives = alternative_set_from_json(field(j, "alternatives", path), at_key(path, "alternatives"));
  const std::string ap = at_key(path, "attributes");
  const Json& attrs = as_array(field(j, "attributes", path), ap);
  for (std::size_t i = 0; i < attrs.size(); ++i) f.attributes.push_back(attribute_from_json(attrs[i], at_index(ap, i)));
  f.statement = statement_from_json(field(j, "statement", path), at_key(path, "statement"));
  return f;
}

Json to_json(const PreferenceStatement& s) {
  Json j{{"lhs", s.lhs},
         {"rhs", s.rhs},
         {"scope", s.scope},
         {"comparator", enum_name(s.comparator, kComparators)},
         {"polarity", enum_name(s.polarity, kPolarities)},
         {"intensity", s.intensity}};
  if (s.kind) j["kind"] = enum_name(*s.kind, kPreferenceKinds);
  return j;
}

PreferenceStatement preference_from_json(const Json& j, const std::string& path) {
  PreferenceStatement s;
  s.lhs = string_list(field(j, "lhs", path), at_key(path, "lhs"));
  s.rhs = string_list(field(j, "rhs", path), at_key(path, "rhs"));
  if (auto* v = optional_field(j, "scope", path)) s.scope = string_list(*v, at_key(path, "scope"));
  if (auto* v = optional_field(j, "comparator", path))
    s.comparator = parse_enum(*v, at_key(path, "comparator"), kComparators);
  if (auto* v = optional_field(j, "polarity", path)) s.polarity = parse_enum(*v, at_key(path, "polarity"), kPolarities);
  if (auto* v = optional_field(j, "intensity", path)) s.intensity = as_bool(*v, at_key(path, "intensity"));
  if (auto* v = optional_field(j, "kind", path)) s.kind = parse_enum(*v, at_key(path, "kind"), kPreferenceKinds);
  return s;
}

Json to_json(const Aggregator& a) {
  Json vetoes = Json::array();
  for (const auto& p : a.vetoes) vetoes.push_back(pair_json(p));
  return {{"archetype", enum_name(a.archetype, kArchetypes)},
          {"weights", a.weights},
          {"importance_order", a.importance_order},
          {"threshold", a.threshold},
          {"vetoes", std::move(vetoes)},
          {"log", a.log}};
}

Aggregator aggregator_from_json(const Json& j, const std::string& path) {
  Aggregator a;
  a.archetype = parse_enum(field(j, "archetype", path), at_key(path, "archetype"), kArchetypes);
  if (auto* v = optional_field(j, "weights", path)) a.weights = number_list(*v, at_key(path, "weights"));
  if (auto* v = optional_field(j, "importance_order", path))
    a.importance_order = string_list(*v, at_key(path, "importance_order"));
  if (auto* v = optional_field(j, "threshold", path)) a.threshold = as_number(*v, at_key(path, "threshold"));
  if (auto* v = optional_field(j, "vetoes", path)) {
    const std::string vp = at_key(path, "vetoes");
    as_array(*v, vp);
    for (std::size_t i = 0; i < v->size(); ++i) a.vetoes.push_back(pair_from((*v)[i], at_index(vp, i)));
  }
  if (auto* v = optional_field(j, "log", path)) a.log = string_list(*v, at_key(path, "log"));
  return a;
}

Json to_json(const CoveringInstance& c) {
  Json rows = Json::array();
  for (const auto& row : c.gamma) {
    Json r = Json::array();
    for (bool b : row) r.push_back(b ? 1 : 0);
    rows.push_back(std::move(r));
  }
  Json j{{"gamma", std::move(rows)}, {"mode", enum_name(c.mode, kCoverModes)}};
  if (!c.costs.empty()) j["costs"] = c.costs;
  if (c.budget) j["budget"] = *c.budget;
  if (!c.populations.empty()) j["populations"] = c.populations;
  if (c.target) j["target"] = *c.target;
  return j;
}

CoveringInstance covering_from_json(const Json& j, const std::string& path) {
  CoveringInstance c;
  const std::string gp = at_key(path, "gamma");
  const Json& rows = as_array(field(j, "gamma", path), gp);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<bool> row;
    const std::string rp = at_index(gp, i);
    const Json& r = as_array(rows[i], rp);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double v = as_number(r[k], at_index(rp, k));
      if (v != 0 && v != 1) parse_fail(at_index(rp, k), "expected 0 or 1");
      row.push_back(v == 1);
    }
    c.gamma.push_back(std::move(row));
  }
  if (auto* v = optional_field(j, "mode", path)) c.mode = parse_enum(*v, at_key(path, "mode"), kCoverModes);
  if (auto* v = optional_field(j, "costs", path)) c.costs = number_list(*v, at_key(path, "costs"));
  if (auto* v = optional_field(j, "budget", path)) c.budget = as_number(*v, at_key(path, "budget"));
  if (auto* v = optional_field(j, "populations", path)) c.populations = number_list(*v, at_key(path, "populations"));
  if (auto* v = optional_field(j, "target", path)) c.target = as_number(*v, at_key(path, "target"));
  wrap<int>(path, [&] {
    c.validate();
    return 0;
  });
  return c;
}

Json to_json(const ModelDocument& d) {
  Json j{{"version", d.version}};
  if (d.formulation) j["formulation"] = to_json(*d.formulation);
  if (!d.statements.empty()) {
    j["statements"] = Json::array();
    for (const auto& s : d.statements) j["statements"].push_back(to_json(s));
  }
  if (d.aggregation) j["aggregation"] = to_json(*d.aggregation);
  if (!d.relations.empty()) {
    j["relations"] = Json::object();
    for (const auto& [name, r] : d.relations) j["relations"][name] = to_json(r);
  }
  if (d.covering) j["covering"] = to_json(*d.covering);
  if (d.process)
    j["process"] = {{"seed_attribute", d.process->seed_attribute},
                    {"max_iter", d.process->max_iter},
                    {"threshold", d.process->threshold},
                    {"seed", d.process->seed}};
  if (!d.sessions.empty()) j["sessions"] = d.sessions;
  if (!d.transcripts.empty()) j["transcripts"] = d.transcripts;
  return j;
}

ModelDocument document_from_json(const Json& j) {
  if (!j.is_object()) parse_fail("", "expected an object");
  ModelDocument d;
  const Json& version = field(j, "version", "");
  if (!version.is_number_integer()) parse_fail("/version", "expected an integer");
  d.version = version.get<int>();
  if (d.version != kFormatVersion)
    throw Error(ErrorCode::UnsupportedVersion, "format version " + std::to_string(d.version) + ", this build reads " +
                                                   std::to_string(kFormatVersion));
  if (auto* f = optional_field(j, "formulation", "")) d.formulation = formulation_from_json(*f, "/formulation");
  if (auto* s = optional_field(j, "statements", "")) {
    as_array(*s, "/statements");
    for (std::size_t i = 0; i < s->size(); ++i)
      d.statements.push_back(preference_from_json((*s)[i], at_index("/statements", i)));
  }
  if (auto* a = optional_field(j, "aggregation", "")) d.aggregation = aggregator_from_json(*a, "/aggregation");
  if (auto* r = optional_field(j, "relations", "")) {
    if (!r->is_object()) parse_fail("/relations", "expected an object");
    for (const auto& [name, rel] : r->items())
      d.relations.emplace(name, relation_from_json(rel, at_key("/relations", name)));
  }
  if (auto* c = optional_field(j, "covering", "")) d.covering = covering_from_json(*c, "/covering");
  if (auto* p = optional_field(j, "process", "")) {
    ProcessSetup ps;
    ps.seed_attribute = as_string(field(*p, "seed_attribute", "/process"), "/process/seed_attribute");
    if (auto* v = optional_field(*p, "max_iter", "/process")) ps.max_iter = as_count(*v, "/process/max_iter");
    if (auto* v = optional_field(*p, "threshold", "/process")) ps.threshold = as_number(*v, "/process/threshold");
    if (auto* v = optional_field(*p, "seed", "/process")) ps.seed = as_count(*v, "/process/seed");
    d.process = ps;
  }
  if (auto* s = optional_field(j, "sessions", "")) {
    as_array(*s, "/sessions");
    d.sessions.assign(s->begin(), s->end());
  }
  if (auto* t = optional_field(j, "transcripts", "")) {
    if (!t->is_object()) parse_fail("/transcripts", "expected an object");
    for (const auto& [name, tr] : t->items()) d.transcripts[name] = tr;
  }
  return d;
}

std::string save_model_string(const ModelDocument& d) { return to_json(d).dump(2) + "\n"; }

ModelDocument load_model_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("/: ") + e.what());
  }
  return document_from_json(j);
}

void save_model(const ModelDocument& d, const std::filesystem::path& file) {
  write_file_atomic(file, save_model_string(d));
}

ModelDocument load_model(const std::filesystem::path& file) { return load_model_string(read_file(file)); }

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + file.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::StartupError, "cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace dp
