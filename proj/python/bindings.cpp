// Python bindings. Structured values cross as JSON text; the package layer
// decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dp/cases.hpp"
#include "dp/covering.hpp"
#include "dp/model_io.hpp"
#include "dp/process.hpp"
#include "dp/solvers.hpp"

namespace py = pybind11;
using namespace dp;

namespace {

std::string nearest_preorder(const std::string& relation, bool exact) {
  const Relation r = relation_from_json(Json::parse(relation));
  const NearestPreorder n = nearest_total_preorder(r, exact ? PreorderMode::exact : PreorderMode::heuristic);
  return Json{{"preorder", to_json(n.preorder)}, {"distance", n.distance}, {"levels", preorder_levels(n.preorder)}}
      .dump();
}

std::string rank(const std::string& relation, std::optional<std::size_t> class_count) {
  RankingOptions opts;
  opts.class_count = class_count;
  const Partition p = solve_ranking(relation_from_json(Json::parse(relation)), opts);
  return Json{{"partition", to_json(p)}, {"rendered", render_order(p)}}.dump();
}

std::string cover(const std::string& matrix, const std::string& algorithm) {
  CoverAlgorithm a = CoverAlgorithm::exact;
  if (algorithm == "greedy")
    a = CoverAlgorithm::greedy;
  else if (algorithm == "brute_force")
    a = CoverAlgorithm::brute_force;
  else if (algorithm != "exact")
    throw Error(ErrorCode::InvalidFormulation, "unknown algorithm '" + algorithm + "'");
  const CoveringSolution s = optimize_covering(parse_covering_matrix(matrix), a);
  return Json{{"open", s.open},
              {"covered", s.covered},
              {"openings", s.openings},
              {"coverage", s.coverage},
              {"rendered", format_openings(s)}}
      .dump();
}

std::string alice(bool with_sw) {
  const CaseReport r = run_alice_case(build_alice_case({}, with_sw));
  Json orders = Json::object();
  for (const auto& [dim, rendered] : r.orders) orders[dim] = rendered;
  return Json{{"orders", orders},
              {"aggregate", r.aggregate ? Json(render_order(*r.aggregate)) : Json()},
              {"ok", r.ok()},
              {"text", r.text()}}
      .dump();
}

std::string validate(const std::string& model) {
  const ModelDocument doc = load_model_string(model);
  Json out = {{"formulation", nullptr}, {"covering", nullptr}};
  if (doc.formulation) {
    const Diagnostics d = validate_formulation(*doc.formulation);
    out["formulation"] = {{"ok", d.ok}, {"choice", d.choice}, {"notes", d.notes}};
  }
  if (doc.covering) {
    doc.covering->validate();
    out["covering"] = {{"districts", doc.covering->size()}};
  }
  if (!doc.formulation && !doc.covering) throw Error(ErrorCode::NoDecisionProblem, "model has no formulation");
  return out.dump();
}

std::string replay(const std::string& model, const std::string& transcript) {
  const ModelDocument doc = load_model_string(model);
  if (!doc.formulation || !doc.process) throw Error(ErrorCode::InvalidFormulation, "model needs formulation and process");
  const auto& attrs = doc.formulation->attributes;
  auto seed = std::find_if(attrs.begin(), attrs.end(),
                           [&](const Attribute& a) { return a.name == doc.process->seed_attribute; });
  if (seed == attrs.end()) throw Error(ErrorCode::UnknownReference, "seed attribute '" + doc.process->seed_attribute + "'");
  ProcessConfig cfg;
  cfg.max_iter = doc.process->max_iter;
  cfg.threshold = doc.process->threshold;
  cfg.seed = doc.process->seed;
  Session s = init_session(*seed, doc.formulation->statement, cfg);
  ScriptedOracle oracle = ScriptedOracle::from_json(Json::parse(transcript));
  run_process(s, oracle);
  return session_to_json(s).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decision problem formulation and partitioning";
  py::register_exception<Error>(m, "DecisionError", PyExc_ValueError);
  m.def("nearest_preorder", &nearest_preorder, py::arg("relation"), py::arg("exact") = true);
  m.def("rank", &rank, py::arg("relation"), py::arg("class_count") = py::none());
  m.def("cover", &cover, py::arg("matrix"), py::arg("algorithm") = "exact");
  m.def("alice", &alice, py::arg("with_sw") = false);
  m.def("validate", &validate, py::arg("model"));
  m.def("replay", &replay, py::arg("model"), py::arg("transcript"));
}
