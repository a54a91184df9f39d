#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dp/aggregation.hpp"
#include "dp/covering.hpp"
#include "dp/formulation.hpp"
#include "dp/oracle.hpp"
#include "dp/primitives.hpp"
#include "dp/relation.hpp"

namespace dp {

inline constexpr int kFormatVersion = 1;

/// Which attribute seeds an interactive session, and its limits.
struct ProcessSetup {
  std::string seed_attribute;
  std::size_t max_iter = 50;
  double threshold = 0.5;
  std::uint64_t seed = 1;

  bool operator==(const ProcessSetup&) const = default;
};

struct ModelDocument {
  int version = kFormatVersion;
  std::optional<ProblemFormulation> formulation;
  std::vector<PreferenceStatement> statements;
  std::optional<Aggregator> aggregation;
  /// Pairwise relations for attributes without an evaluator, by attribute.
  std::map<std::string, Relation> relations;
  std::optional<CoveringInstance> covering;
  std::optional<ProcessSetup> process;
  /// Persisted sessions, as written by session_to_json.
  std::vector<Json> sessions;
  std::map<std::string, Json> transcripts;

  bool operator==(const ModelDocument&) const = default;
};

// Every *_from_json throws ParseError naming the JSON pointer of the fault.

Json to_json(const Relation& r);
Relation relation_from_json(const Json& j, const std::string& path = "");
Json to_json(const Partition& p);
Partition partition_from_json(const Json& j, const std::string& path = "");
Json to_json(const Domain& d);
Domain domain_from_json(const Json& j, const std::string& path = "");
Json to_json(const Variable& v);
Variable variable_from_json(const Json& j, const std::string& path = "");
Json to_json(const Attribute& a);
Attribute attribute_from_json(const Json& j, const std::string& path = "");
Json to_json(const AlternativeSet& s);
AlternativeSet alternative_set_from_json(const Json& j, const std::string& path = "");
Json to_json(const ProblemStatement& s);
ProblemStatement statement_from_json(const Json& j, const std::string& path = "");
Json to_json(const ProblemFormulation& f);
ProblemFormulation formulation_from_json(const Json& j, const std::string& path = "");
Json to_json(const PreferenceStatement& s);
PreferenceStatement preference_from_json(const Json& j, const std::string& path = "");
Json to_json(const Aggregator& a);
Aggregator aggregator_from_json(const Json& j, const std::string& path = "");
Json to_json(const CoveringInstance& c);
CoveringInstance covering_from_json(const Json& j, const std::string& path = "");
Json to_json(const ModelDocument& d);
ModelDocument document_from_json(const Json& j);

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string save_model_string(const ModelDocument& d);
ModelDocument load_model_string(const std::string& text);
void save_model(const ModelDocument& d, const std::filesystem::path& file);
ModelDocument load_model(const std::filesystem::path& file);

std::string read_file(const std::filesystem::path& file);
/// Writes through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& file, const std::string& text);

}  // namespace dp
