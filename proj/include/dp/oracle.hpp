#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace dp {

using Json = nlohmann::json;

/// A question put to the client. `key` identifies it across runs; `payload`
/// carries the details a human needs to answer.
struct OracleQuery {
  std::string kind;
  std::string key;
  Json payload = Json::object();
};

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual Json ask(const OracleQuery& query) = 0;
};

/// Answers from a key -> answer table. Missing keys raise IncompleteElicitation.
class ScriptedOracle : public Oracle {
 public:
  ScriptedOracle() = default;
  explicit ScriptedOracle(std::map<std::string, Json> answers) : answers_(std::move(answers)) {}
  /// Accepts an object {key: answer} or an array of {"key", "answer"} records.
  static ScriptedOracle from_json(const Json& transcript);

  void set(const std::string& key, Json answer) { answers_[key] = std::move(answer); }
  Json ask(const OracleQuery& query) override;

 private:
  std::map<std::string, Json> answers_;
};

class FunctionOracle : public Oracle {
 public:
  explicit FunctionOracle(std::function<Json(const OracleQuery&)> fn) : fn_(std::move(fn)) {}
  Json ask(const OracleQuery& query) override { return fn_(query); }

 private:
  std::function<Json(const OracleQuery&)> fn_;
};

/// Records every answer verbatim; a repeated key returns the recorded answer
/// without consulting the inner oracle again.
class RecordingOracle : public Oracle {
 public:
  explicit RecordingOracle(Oracle& inner) : inner_(inner) {}
  Json ask(const OracleQuery& query) override;

  const std::vector<std::pair<std::string, Json>>& transcript() const noexcept { return transcript_; }
  std::size_t calls() const noexcept { return calls_; }

 private:
  Oracle& inner_;
  std::map<std::string, Json> seen_;
  std::vector<std::pair<std::string, Json>> transcript_;
  std::size_t calls_ = 0;
};

/// Transcript as an array of {"key", "answer"} records.
Json transcript_to_json(const std::vector<std::pair<std::string, Json>>& transcript);

}  // namespace dp
