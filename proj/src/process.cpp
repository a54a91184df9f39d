#include "dp/process.hpp"

#include <algorithm>
#include <set>

#include "dp/aggregation.hpp"
#include "dp/model_io.hpp"
#include "dp/solvers.hpp"

namespace dp {

namespace {

constexpr std::pair<const char*, SessionStatus> kStatuses[] = {
    {"running", SessionStatus::running}, {"satisfied", SessionStatus::satisfied}, {"exhausted", SessionStatus::exhausted}};

const std::set<std::string> kPairwiseAnswers = {"left", "right", "indifferent", "incomparable"};

[[noreturn]] void violation(const std::string& why) { throw Error(ErrorCode::ProtocolViolation, why); }

std::string pair_key(const std::string& x, const std::string& y) { return x + "|" + y; }

bool elicited(const Attribute& a) { return a.separable && !a.evaluator && !a.decomposition; }

std::vector<Alternative> incumbent(const Session& s) {
  std::vector<Alternative> out;
  for (const auto& m : *s.alternatives.explicit_members) out.push_back(s.alternatives.make(m));
  return out;
}

std::vector<std::string> member_ids(const Session& s) {
  std::vector<std::string> out;
  for (const auto& m : *s.alternatives.explicit_members) out.push_back(m.id);
  return out;
}

Json describe_member(const Session& s, const ExplicitMember& m) {
  Json values = Json::object();
  for (const auto& v : s.alternatives.variables) values[v.name] = v.domain.describe(m.assignment.at(v.name));
  return {{"id", m.id}, {"values", std::move(values)}};
}

Relation elicited_relation(const Session& s, const std::vector<ElementId>& carrier, const std::string& attr) {
  Relation r(carrier);
  for (std::size_t i = 0; i < carrier.size(); ++i) r.set(i, i);
  auto it = s.pairwise.find(attr);
  if (it == s.pairwise.end()) return r;
  for (std::size_t i = 0; i < carrier.size(); ++i)
    for (std::size_t j = i + 1; j < carrier.size(); ++j) {
      auto a = it->second.find(pair_key(carrier[i].str(), carrier[j].str()));
      if (a == it->second.end()) continue;
      if (a->second == "left" || a->second == "indifferent") r.set(i, j);
      if (a->second == "right" || a->second == "indifferent") r.set(j, i);
    }
  return r;
}

NormSet norms_on(const NormSet& norms, const PerformanceTable& table) {
  NormSet out = norms;
  for (auto& level : out.levels)
    std::erase_if(level.thresholds, [&](const auto& kv) {
      return std::find(table.attributes.begin(), table.attributes.end(), kv.first) == table.attributes.end();
    });
  return out;
}

void schedule(Session& s) {
  const auto ids = member_ids(s);
  const auto& members = *s.alternatives.explicit_members;
  for (const auto& a : s.attributes) {
    if (!elicited(a)) continue;
    const auto& done = s.pairwise[a.name];
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        const std::string key = pair_key(ids[i], ids[j]);
        if (done.count(key)) continue;
        s.pending.push_back({"pairwise",
                             "pairwise@" + a.name + ":" + key,
                             {{"attribute", a.name},
                              {"left", describe_member(s, members[i])},
                              {"right", describe_member(s, members[j])}}});
      }
  }
  if (!s.pending.empty()) return;
  s.partition = partition_incumbent(s);
  Json payload{{"iteration", s.iteration()}, {"partition", to_json(*s.partition)}};
  if (s.partition->ordered()) payload["rendered"] = render_order(*s.partition);
  s.pending.push_back({"satisfaction", "satisfaction@" + std::to_string(s.iteration()), std::move(payload)});
}

std::set<std::string> known_variables(const Session& s) {
  std::set<std::string> names;
  for (const auto& v : s.alternatives.variables) names.insert(v.name);
  for (const auto& v : s.staged_variables) names.insert(v.name);
  return names;
}

void check_references(const Attribute& a, const std::set<std::string>& variables) {
  if (a.evaluator)
    for (const auto& id : a.evaluator->identifiers())
      if (!variables.count(id)) violation("attribute '" + a.name + "' reads unknown variable '" + id + "'");
  if (a.decomposition)
    for (const auto& [var, expr] : a.decomposition->per_variable) {
      if (!variables.count(var)) violation("attribute '" + a.name + "' decomposes over unknown variable '" + var + "'");
      for (const auto& id : expr.identifiers())
        if (id != "x" && !variables.count(id))
          violation("attribute '" + a.name + "' reads unknown variable '" + id + "'");
    }
}

void commit_extension(Session& s) {
  const auto vars = known_variables(s);
  for (const auto& a : s.staged_attributes) check_references(a, vars);

  const Partition& previous = *s.partition;
  std::set<std::string> kept;
  const auto classes = s.kept_classes.value_or(std::vector<std::size_t>{});
  for (std::size_t c = 0; c < previous.size(); ++c)
    if (!s.kept_classes || std::find(classes.begin(), classes.end(), c) != classes.end())
      for (const auto& e : previous.classes()[c]) kept.insert(e.str());

  std::uint64_t combos = 1;
  for (const auto& v : s.staged_variables) {
    combos *= v.domain.cardinality();
    if (combos * kept.size() > kDefaultEnumerationCap) violation("extension exceeds the enumeration cap");
  }

  std::vector<ExplicitMember> members;
  std::map<std::string, std::string> parents;
  for (const auto& m : *s.alternatives.explicit_members) {
    if (!kept.count(m.id)) continue;
    for (std::uint64_t k = 0; k < combos; ++k) {
      ExplicitMember child = m;
      std::uint64_t rest = k;
      std::vector<std::string> parts;
      for (std::size_t v = s.staged_variables.size(); v-- > 0;) {
        const auto& var = s.staged_variables[v];
        const std::uint64_t card = var.domain.cardinality();
        const double value = var.domain.value_at(rest % card);
        rest /= card;
        child.assignment[var.name] = value;
        parts.insert(parts.begin(), var.name + "=" + var.domain.describe(value));
      }
      for (const auto& p : parts) child.id += "," + p;
      parents[child.id] = m.id;
      members.push_back(std::move(child));
    }
  }

  const std::size_t i = s.history.size();
  if (!s.staged_attributes.empty() && !s.staged_variables.empty())
    s.log.push_back("iteration " + std::to_string(i) + ": attributes and variables added together");
  for (const auto& a : s.staged_attributes) {
    s.log.push_back("iteration " + std::to_string(i) + ": attribute " + a.name);
    s.attributes.push_back(a);
  }
  for (const auto& v : s.staged_variables) {
    s.log.push_back("iteration " + std::to_string(i) + ": variable " + v.name);
    s.alternatives.variables.push_back(v);
  }
  s.alternatives.explicit_members = std::move(members);
  s.lineage.push_back(std::move(parents));
  s.staged_attributes.clear();
  s.staged_variables.clear();
  s.kept_classes.reset();
}

Json normalise_satisfaction(const Json& answer, const Partition& p, bool& satisfied,
                            std::vector<std::size_t>& kept, bool& want_attribute, bool& want_variable) {
  want_attribute = want_variable = true;
  if (answer.is_boolean()) {
    satisfied = answer.get<bool>();
  } else if (answer.is_object() && answer.contains("satisfied") && answer["satisfied"].is_boolean()) {
    satisfied = answer["satisfied"].get<bool>();
    if (auto it = answer.find("kept_classes"); it != answer.end() && !it->is_null()) {
      if (!it->is_array()) violation("kept_classes must be an array");
      for (const auto& c : *it) {
        if (!c.is_number_integer() || c.get<long long>() < 0 || c.get<std::size_t>() >= p.size())
          violation("kept class out of range");
        kept.push_back(c.get<std::size_t>());
      }
      std::sort(kept.begin(), kept.end());
      kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
      if (kept.empty()) violation("at least one class must be kept");
    }
    if (auto it = answer.find("request"); it != answer.end() && !it->is_null()) {
      if (!it->is_array()) violation("request must be an array");
      want_attribute = want_variable = false;
      for (const auto& r : *it) {
        if (r == "attribute")
          want_attribute = true;
        else if (r == "variable")
          want_variable = true;
        else
          violation("request entries are \"attribute\" or \"variable\"");
      }
      if (!want_attribute && !want_variable && !satisfied) violation("empty request");
    }
  } else {
    violation("satisfaction answer must be a boolean or an object with \"satisfied\"");
  }
  if (satisfied) return {{"satisfied", true}};
  if (kept.empty())
    for (std::size_t c = 0; c < p.size(); ++c) kept.push_back(c);
  Json request = Json::array();
  if (want_attribute) request.push_back("attribute");
  if (want_variable) request.push_back("variable");
  return {{"satisfied", false}, {"kept_classes", kept}, {"request", std::move(request)}};
}

template <typename T>
T decode(const std::function<T()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    violation(e.what());
  }
}

}  // namespace

std::string_view to_string(SessionStatus s) {
  for (const auto& [name, v] : kStatuses)
    if (v == s) return name;
  return "?";
}

Session init_session(const Attribute& seed, const ProblemStatement& statement, const ProcessConfig& config,
                     std::string id) {
  if (!seed.separable)
    throw Error(ErrorCode::NoDecisionProblem, "seed attribute '" + seed.name + "' is not separable");
  if (seed.codomain.numeric())
    throw Error(ErrorCode::NotEnumerable, "seed attribute '" + seed.name + "' has no finite codomain");
  if ((statement.kind == StatementKind::rating || statement.kind == StatementKind::assignment) && !statement.norms)
    throw Error(ErrorCode::MissingNorms, std::string(to_string(statement.kind)) + " needs a norm set");
  if (config.max_iter < 1) throw Error(ErrorCode::InvalidFormulation, "max_iter must be at least 1");

  Session s;
  s.id = std::move(id);
  s.statement = statement;
  s.config = config;
  Variable v{seed.name, Domain::enumerated(seed.codomain.labels)};
  v.domain.validate(seed.name);
  s.alternatives.variables = {v};
  std::vector<ExplicitMember> members;
  for (std::size_t k = 0; k < seed.codomain.labels.size(); ++k)
    members.push_back({seed.codomain.labels[k], {{seed.name, static_cast<double>(k)}}});
  s.alternatives.explicit_members = std::move(members);
  Attribute a = seed;
  a.evaluator = Expression(seed.name);
  a.decomposition.reset();
  s.attributes = {a};
  schedule(s);
  return s;
}

Partition partition_incumbent(const Session& s) {
  const auto alts = incumbent(s);
  const PerformanceTable table = build_performance_table(alts, s.attributes);
  std::vector<Relation> relations;
  for (const auto& a : s.attributes) {
    if (!a.separable) continue;
    if (elicited(a))
      relations.push_back(elicited_relation(s, table.carrier, a.name));
    else
      relations.push_back(induced_relation(table, table.attribute_index(a.name), a));
  }
  if (relations.empty()) throw Error(ErrorCode::NoDecisionProblem, "no separable attribute");
  const double m = static_cast<double>(relations.size());
  const double strict = static_cast<double>(relations.size() / 2 + 1) / m;
  const Relation combined = relations.size() == 1
                                ? relations.front()
                                : aggregate_majority(relations, std::max(s.config.threshold, strict));
  const std::size_t n = table.carrier.size();

  switch (s.statement.kind) {
    case StatementKind::ranking:
      return solve_ranking(combined, {s.statement.class_count, SolveMode::automatic, s.config.exact_cap});
    case StatementKind::clustering: {
      const std::size_t k = std::clamp<std::size_t>(s.statement.class_count.value_or(2), 1, std::max<std::size_t>(n, 1));
      ClusteringOptions opt;
      opt.exact_cap = s.config.exact_cap;
      opt.seed = s.config.seed;
      return solve_clustering(combined, k, opt).partition;
    }
    case StatementKind::rating: {
      const auto per_dimension = norm_relations(table, s.attributes, norms_on(*s.statement.norms, table));
      if (per_dimension.empty()) {
        std::vector<std::vector<ElementId>> one{table.carrier};
        return Partition(one, true, {s.statement.norms->levels.front().id});
      }
      return solve_rating(per_dimension);
    }
    case StatementKind::assignment: {
      const auto rules = rules_from_norms(norms_on(*s.statement.norms, table), s.attributes);
      return solve_assignment(table, s.attributes, rules);
    }
  }
  throw Error(ErrorCode::InvalidFormulation, "unknown statement kind");
}

void apply_step(Session& s, const std::string& key, const Json& answer) {
  if (s.status != SessionStatus::running)
    violation("session " + s.id + " is " + std::string(to_string(s.status)));
  if (s.pending.empty()) violation("no pending query");
  if (s.pending.front().key != key)
    violation("expected an answer to '" + s.pending.front().key + "', got '" + key + "'");

  Session n = s;
  const OracleQuery q = n.pending.front();
  n.pending.pop_front();

  if (q.kind == "pairwise") {
    if (!answer.is_string() || !kPairwiseAnswers.count(answer.get<std::string>()))
      violation("pairwise answers are left, right, indifferent or incomparable");
    const std::string x = q.payload["left"]["id"], y = q.payload["right"]["id"];
    n.pairwise[q.payload["attribute"].get<std::string>()][pair_key(x, y)] = answer.get<std::string>();
  } else if (q.kind == "satisfaction") {
    bool satisfied = false, want_attribute = true, want_variable = true;
    std::vector<std::size_t> kept;
    Json normal = normalise_satisfaction(answer, *n.partition, satisfied, kept, want_attribute, want_variable);
    n.history.push_back({n.history.size() + 1, member_ids(n), *n.partition, normal});
    const std::string i = std::to_string(n.history.size());
    if (satisfied) {
      n.status = SessionStatus::satisfied;
      n.pending.clear();
    } else if (n.history.size() >= n.config.max_iter) {
      n.status = SessionStatus::exhausted;
      n.pending.clear();
      n.log.push_back("iteration " + i + ": iteration cap reached");
    } else {
      n.kept_classes = kept;
      if (want_attribute) n.pending.push_back({"propose_attribute", "propose_attribute@" + i, {{"iteration", n.history.size()}}});
      if (want_variable) n.pending.push_back({"propose_variable", "propose_variable@" + i, {{"iteration", n.history.size()}}});
    }
  } else if (q.kind == "propose_attribute") {
    if (!answer.is_null()) {
      Attribute a = decode<Attribute>([&] { return attribute_from_json(answer); });
      auto clash = [&](const Attribute& b) { return b.name == a.name; };
      if (std::any_of(n.attributes.begin(), n.attributes.end(), clash) ||
          std::any_of(n.staged_attributes.begin(), n.staged_attributes.end(), clash))
        violation("attribute '" + a.name + "' already exists");
      n.staged_attributes.push_back(std::move(a));
    }
  } else if (q.kind == "propose_variable") {
    if (!answer.is_null()) {
      Variable v = decode<Variable>([&] { return variable_from_json(answer); });
      if (!v.domain.finite()) violation("variable '" + v.name + "' has an infinite domain");
      if (known_variables(n).count(v.name)) violation("variable '" + v.name + "' already exists");
      n.staged_variables.push_back(std::move(v));
    }
  } else {
    violation("unknown query kind '" + q.kind + "'");
  }

  if ((q.kind == "propose_attribute" || q.kind == "propose_variable") && n.pending.empty()) commit_extension(n);
  n.transcript.emplace_back(key, answer);
  if (n.status == SessionStatus::running && n.pending.empty()) schedule(n);
  s = std::move(n);
}

Partition run_process(Session& s, Oracle& oracle, std::optional<std::size_t> max_iter) {
  if (max_iter) {
    if (*max_iter < 1) throw Error(ErrorCode::InvalidFormulation, "max_iter must be at least 1");
    s.config.max_iter = *max_iter;
  }
  if (s.status == SessionStatus::running && s.history.size() >= s.config.max_iter) {
    s.status = SessionStatus::exhausted;
    s.pending.clear();
  }
  while (s.status == SessionStatus::running) {
    if (s.pending.empty()) schedule(s);
    const OracleQuery q = s.pending.front();
    apply_step(s, q.key, oracle.ask(q));
  }
  return s.history.empty() ? *s.partition : s.history.back().partition;
}

bool lineage_consistent(const Session& s) {
  for (std::size_t k = 0; k < s.lineage.size(); ++k) {
    if (k >= s.history.size()) return false;
    const HistoryEntry& before = s.history[k];
    std::set<std::string> allowed;
    for (std::size_t c : before.answer.value("kept_classes", std::vector<std::size_t>{}))
      for (const auto& e : before.partition.classes().at(c)) allowed.insert(e.str());
    const std::vector<std::string> alts = k + 1 < s.history.size() ? s.history[k + 1].alternatives : member_ids(s);
    for (const auto& a : alts) {
      auto it = s.lineage[k].find(a);
      if (it == s.lineage[k].end() || !allowed.count(it->second)) return false;
    }
  }
  return true;
}

Json session_to_json(const Session& s) {
  Json history = Json::array();
  for (const auto& h : s.history)
    history.push_back({{"iteration", h.iteration},
                       {"alternatives", h.alternatives},
                       {"partition", to_json(h.partition)},
                       {"answer", h.answer}});
  Json pending = Json::array();
  for (const auto& q : s.pending) pending.push_back({{"kind", q.kind}, {"key", q.key}, {"payload", q.payload}});
  Json attributes = Json::array(), staged_attributes = Json::array(), staged_variables = Json::array();
  for (const auto& a : s.attributes) attributes.push_back(to_json(a));
  for (const auto& a : s.staged_attributes) staged_attributes.push_back(to_json(a));
  for (const auto& v : s.staged_variables) staged_variables.push_back(to_json(v));
  return {{"id", s.id},
          {"status", to_string(s.status)},
          {"config",
           {{"max_iter", s.config.max_iter},
            {"threshold", s.config.threshold},
            {"exact_cap", s.config.exact_cap},
            {"seed", s.config.seed}}},
          {"statement", to_json(s.statement)},
          {"alternatives", to_json(s.alternatives)},
          {"attributes", std::move(attributes)},
          {"history", std::move(history)},
          {"pending", std::move(pending)},
          {"partition", s.partition ? to_json(*s.partition) : Json(nullptr)},
          {"pairwise", s.pairwise},
          {"lineage", s.lineage},
          {"transcript", transcript_to_json(s.transcript)},
          {"log", s.log},
          {"kept_classes", s.kept_classes ? Json(*s.kept_classes) : Json(nullptr)},
          {"staged_attributes", std::move(staged_attributes)},
          {"staged_variables", std::move(staged_variables)}};
}

Session session_from_json(const Json& j) {
  try {
    Session s;
    s.id = j.at("id").get<std::string>();
    const std::string status = j.at("status").get<std::string>();
    bool found = false;
    for (const auto& [name, v] : kStatuses)
      if (status == name) {
        s.status = v;
        found = true;
      }
    if (!found) throw Error(ErrorCode::ParseError, "/status: unknown value '" + status + "'");
    const Json& c = j.at("config");
    s.config = {c.at("max_iter").get<std::size_t>(), c.at("threshold").get<double>(),
                c.at("exact_cap").get<std::size_t>(), c.at("seed").get<std::uint64_t>()};
    s.statement = statement_from_json(j.at("statement"), "/statement");
    s.alternatives = alternative_set_from_json(j.at("alternatives"), "/alternatives");
    if (!s.alternatives.explicit_members)
      throw Error(ErrorCode::ParseError, "/alternatives/members: missing");
    for (std::size_t i = 0; i < j.at("attributes").size(); ++i)
      s.attributes.push_back(attribute_from_json(j["attributes"][i], "/attributes/" + std::to_string(i)));
    for (std::size_t i = 0; i < j.at("history").size(); ++i) {
      const Json& h = j["history"][i];
      s.history.push_back({h.at("iteration").get<std::size_t>(), h.at("alternatives").get<std::vector<std::string>>(),
                           partition_from_json(h.at("partition"), "/history/" + std::to_string(i) + "/partition"),
                           h.at("answer")});
    }
    for (const auto& q : j.at("pending"))
      s.pending.push_back({q.at("kind").get<std::string>(), q.at("key").get<std::string>(), q.at("payload")});
    if (!j.at("partition").is_null()) s.partition = partition_from_json(j["partition"], "/partition");
    s.pairwise = j.at("pairwise").get<PairwiseAnswers>();
    s.lineage = j.at("lineage").get<std::vector<std::map<std::string, std::string>>>();
    for (const auto& t : j.at("transcript")) s.transcript.emplace_back(t.at("key").get<std::string>(), t.at("answer"));
    s.log = j.at("log").get<std::vector<std::string>>();
    if (!j.at("kept_classes").is_null()) s.kept_classes = j["kept_classes"].get<std::vector<std::size_t>>();
    for (std::size_t i = 0; i < j.at("staged_attributes").size(); ++i)
      s.staged_attributes.push_back(
          attribute_from_json(j["staged_attributes"][i], "/staged_attributes/" + std::to_string(i)));
    for (std::size_t i = 0; i < j.at("staged_variables").size(); ++i)
      s.staged_variables.push_back(
          variable_from_json(j["staged_variables"][i], "/staged_variables/" + std::to_string(i)));
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("session: ") + e.what());
  }
}

}  // namespace dp
