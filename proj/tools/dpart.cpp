// dpart: command-line front end for models, cases, elicitation and the service.

#include <CLI11.hpp>

#include <iostream>

#include "dp/aggregation.hpp"
#include "dp/cases.hpp"
#include "dp/model_io.hpp"
#include "dp/process.hpp"
#include "dp/service.hpp"
#include "dp/solvers.hpp"

#ifndef DP_DATA_DIR
#define DP_DATA_DIR "data"
#endif

namespace {

using namespace dp;

void print_partition(const Partition& p) {
  if (p.ordered()) std::cout << "order: " << render_order(p) << "\n";
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::cout << (k < p.labels().size() ? p.labels()[k] : "class " + std::to_string(k + 1)) << ":";
    for (const auto& e : p.classes()[k]) std::cout << " " << e.str();
    std::cout << "\n";
  }
}

int cmd_validate(const std::string& path) {
  const ModelDocument doc = load_model(path);
  if (doc.formulation) {
    const Diagnostics d = validate_formulation(*doc.formulation);
    std::cout << "ok: " << to_string(doc.formulation->statement.kind) << (d.choice ? " (choice)" : "") << "\n";
    for (const auto& n : d.notes) std::cout << "note: " << n << "\n";
  }
  if (doc.covering) {
    doc.covering->validate();
    std::cout << "ok: covering, " << doc.covering->size() << " districts\n";
  }
  if (!doc.formulation && !doc.covering) throw Error(ErrorCode::NoDecisionProblem, "model has no formulation");
  return 0;
}

int solve_formulation(const ModelDocument& doc, SolveMode mode) {
  const ProblemFormulation& f = *doc.formulation;
  validate_formulation(f);
  const Enumeration e = enumerate_alternatives(f.alternatives, kPipelineCap);
  if (!e.total || *e.total > kPipelineCap)
    throw Error(ErrorCode::CapExceeded, "more than " + std::to_string(kPipelineCap) + " feasible alternatives");
  const PerformanceTable table = build_performance_table(e.alternatives, f.attributes);

  std::vector<Relation> relations;
  std::vector<std::string> names;
  for (const auto& a : f.attributes) {
    if (!a.separable) continue;
    if (auto it = doc.relations.find(a.name); it != doc.relations.end()) {
      if (it->second.carrier() != table.carrier)
        throw Error(ErrorCode::CarrierMismatch, "relation '" + a.name + "' is not over the enumerated alternatives");
      relations.push_back(it->second.reflexive_closure());
    } else if (a.evaluator || a.decomposition) {
      relations.push_back(induced_relation(table, table.attribute_index(a.name), a));
    } else {
      throw Error(ErrorCode::IncompleteElicitation, "no preferences for attribute '" + a.name + "'");
    }
    names.push_back(a.name);
  }
  Aggregator agg;
  if (doc.aggregation) agg = *doc.aggregation;
  const Relation combined = apply_aggregator(agg, relations, names);

  std::cout << "alternatives=" << table.carrier.size() << "\n";
  const ProblemStatement& st = f.statement;
  switch (st.kind) {
    case StatementKind::ranking: {
      const NearestPreorder np = ranking_preorder(combined, {st.class_count, mode, kDefaultExactCap});
      std::cout << "repair_distance=" << np.distance << "\n";
      print_partition(solve_ranking(combined, {st.class_count, mode, kDefaultExactCap}));
      break;
    }
    case StatementKind::clustering: {
      ClusteringOptions opt;
      opt.mode = mode;
      const Clustering c = solve_clustering(combined, st.class_count.value_or(2), opt);
      std::cout << "cost=" << c.cost << "\n";
      print_partition(c.partition);
      break;
    }
    case StatementKind::rating:
      print_partition(solve_rating(norm_relations(table, f.attributes, *st.norms)));
      break;
    case StatementKind::assignment:
      print_partition(solve_assignment(table, f.attributes, rules_from_norms(*st.norms, f.attributes)));
      break;
  }
  return 0;
}

int cmd_solve(const std::string& path, const std::string& algorithm, const std::string& mode) {
  const ModelDocument doc = load_model(path);
  if (doc.covering) {
    const CoverAlgorithm alg = algorithm == "greedy"        ? CoverAlgorithm::greedy
                               : algorithm == "brute_force" ? CoverAlgorithm::brute_force
                                                            : CoverAlgorithm::exact;
    const CoveringSolution s = optimize_covering(*doc.covering, alg);
    std::cout << "openings=" << s.openings << "\ncoverage=" << s.coverage << "\nopen=" << format_openings(s) << "\n";
    return 0;
  }
  if (!doc.formulation) throw Error(ErrorCode::NoDecisionProblem, "model has no formulation");
  const SolveMode m = mode == "exact" ? SolveMode::exact : mode == "heuristic" ? SolveMode::heuristic : SolveMode::automatic;
  return solve_formulation(doc, m);
}

int cmd_case(const std::string& which, const std::string& variant, bool with_sw, const std::string& fixture,
             const std::string& algorithm) {
  CaseReport r;
  if (which == "alice") {
    r = run_alice_case(build_alice_case({}, with_sw || variant == "sw"));
  } else {
    CoveringInstance inst = parse_covering_matrix(read_file(fixture));
    if (variant == "max_cover") {
      inst.mode = CoverMode::max_cover;
      inst.budget = static_cast<double>(inst.size());
    }
    r = run_covering_case(build_covering_case(inst),
                          algorithm == "greedy" ? CoverAlgorithm::greedy : CoverAlgorithm::exact);
  }
  std::cout << r.text();
  return r.ok() ? 0 : 1;
}

int cmd_elicit(const std::string& path, const std::string& transcript, const std::string& out) {
  const ModelDocument doc = load_model(path);
  if (!doc.formulation || !doc.process) throw Error(ErrorCode::InvalidFormulation, "model needs formulation and process");
  const auto& attrs = doc.formulation->attributes;
  auto seed = std::find_if(attrs.begin(), attrs.end(), [&](const Attribute& a) { return a.name == doc.process->seed_attribute; });
  if (seed == attrs.end()) throw Error(ErrorCode::UnknownReference, "seed attribute '" + doc.process->seed_attribute + "'");
  ProcessConfig cfg;
  cfg.max_iter = doc.process->max_iter;
  cfg.threshold = doc.process->threshold;
  cfg.seed = doc.process->seed;
  Session s = init_session(*seed, doc.formulation->statement, cfg);
  ScriptedOracle scripted = ScriptedOracle::from_json(Json::parse(read_file(transcript)));
  RecordingOracle oracle(scripted);
  int code = 0;
  try {
    run_process(s, oracle);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IncompleteElicitation) throw;
    std::cerr << e.what() << "\n";
    code = 1;
  }
  std::cout << "status=" << to_string(s.status) << "\niterations=" << s.history.size() << "\n";
  if (s.partition) print_partition(*s.partition);
  if (!out.empty()) write_file_atomic(out, session_to_json(s).dump(2) + "\n");
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision problem formulation and partitioning"};
  app.require_subcommand(1);

  std::string model, algorithm = "exact", mode = "auto", variant, fixture = DP_DATA_DIR "/fixtures/geo20.txt",
                     transcript, out, store = default_store().string(), host = "127.0.0.1", which;
  bool with_sw = false;
  int port = 8080;
  std::uint64_t seed = 1;

  auto* validate = app.add_subcommand("validate", "Check a model file");
  validate->add_option("model", model, "Model file")->required();

  auto* solve = app.add_subcommand("solve", "Partition the alternatives of a model");
  solve->add_option("model", model, "Model file")->required();
  solve->add_option("--algorithm", algorithm, "Covering: exact, greedy or brute_force");
  solve->add_option("--mode", mode, "auto, exact or heuristic");

  auto* kase = app.add_subcommand("case", "Run a bundled case");
  kase->add_option("which", which, "covering or alice")->required()->check(CLI::IsMember({"covering", "alice"}));
  kase->add_option("--variant", variant, "covering: full_cover or max_cover; alice: sw");
  kase->add_flag("--with-sw", with_sw, "Alice with the booking option");
  kase->add_option("--fixture", fixture, "Covering adjacency matrix");
  kase->add_option("--algorithm", algorithm, "exact or greedy");

  auto* elicit = app.add_subcommand("elicit", "Replay a transcript through the elicitation loop");
  elicit->add_option("model", model, "Model file with a process section")->required();
  elicit->add_option("--transcript", transcript, "Answers file")->required();
  elicit->add_option("--out", out, "Write the final session here");

  auto* serve_cmd = app.add_subcommand("serve", "Run the session service");
  serve_cmd->add_option("--port", port, "Port");
  serve_cmd->add_option("--host", host, "Interface");
  serve_cmd->add_option("--store", store, "Storage directory (default $DP_STORE)");
  serve_cmd->add_option("--seed", seed, "Seed for heuristic solvers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*validate) return cmd_validate(model);
    if (*solve) return cmd_solve(model, algorithm, mode);
    if (*kase) return cmd_case(which, variant, with_sw, fixture, algorithm);
    if (*elicit) return cmd_elicit(model, transcript, out);
    if (*serve_cmd) {
      SessionService service({store, seed});
      std::cout << "serving on " << host << ":" << port << ", store " << store << std::endl;
      serve(service, host, port);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
