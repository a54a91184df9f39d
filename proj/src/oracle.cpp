#include "dp/oracle.hpp"

#include "dp/error.hpp"

namespace dp {

ScriptedOracle ScriptedOracle::from_json(const Json& transcript) {
  ScriptedOracle out;
  if (transcript.is_object()) {
    for (const auto& [key, answer] : transcript.items()) out.set(key, answer);
  } else if (transcript.is_array()) {
    for (std::size_t i = 0; i < transcript.size(); ++i) {
      const Json& rec = transcript[i];
      if (!rec.is_object() || !rec.contains("key") || !rec["key"].is_string() || !rec.contains("answer"))
        throw Error(ErrorCode::ParseError, "/" + std::to_string(i) + ": expected {\"key\", \"answer\"}");
      out.set(rec["key"].get<std::string>(), rec["answer"]);
    }
  } else {
    throw Error(ErrorCode::ParseError, "transcript must be an object or an array");
  }
  return out;
}

Json ScriptedOracle::ask(const OracleQuery& query) {
  auto it = answers_.find(query.key);
  if (it == answers_.end())
    throw Error(ErrorCode::IncompleteElicitation, "no scripted answer for '" + query.key + "'");
  return it->second;
}

Json RecordingOracle::ask(const OracleQuery& query) {
  if (auto it = seen_.find(query.key); it != seen_.end()) return it->second;
  Json answer = inner_.ask(query);
  ++calls_;
  seen_.emplace(query.key, answer);
  transcript_.emplace_back(query.key, answer);
  return answer;
}

Json transcript_to_json(const std::vector<std::pair<std::string, Json>>& transcript) {
  Json out = Json::array();
  for (const auto& [key, answer] : transcript) out.push_back({{"key", key}, {"answer", answer}});
  return out;
}

}  // namespace dp
