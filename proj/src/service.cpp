#include "dp/service.hpp"

#include <cstdlib>
#include <regex>

#include <httplib.h>

#include "dp/model_io.hpp"

namespace dp {

namespace {

// The library default also sets SO_REUSEPORT, which lets a second server
// share a busy port instead of failing.
void exclusive_port(httplib::Server& server) {
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
}

const std::regex kNamePattern("[A-Za-z0-9_.-]{1,128}");

bool valid_name(const std::string& s) { return std::regex_match(s, kNamePattern) && s != "." && s != ".."; }

ServiceResponse error_response(int status, const std::string& code, const std::string& message) {
  return {status, {{"error", code}, {"message", message}}};
}

ServiceResponse error_response(const Error& e) {
  int status = 422;
  switch (e.code()) {
    case ErrorCode::ProtocolViolation:
      status = 409;
      break;
    case ErrorCode::ParseError:
    case ErrorCode::UnsupportedVersion:
      status = 400;
      break;
    default:
      break;
  }
  return error_response(status, std::string(code_name(e.code())), e.what());
}

ServiceResponse not_found(const std::string& what) { return error_response(404, "NotFound", what); }

Json response_json(const ServiceResponse& r) { return {{"status", r.status}, {"body", r.body}}; }

ServiceResponse response_from(const Json& j) { return {j.at("status").get<int>(), j.at("body")}; }

Json pending_view(const Session& s) {
  Json queue = Json::array();
  for (const auto& q : s.pending) queue.push_back({{"kind", q.kind}, {"key", q.key}, {"payload", q.payload}});
  return {{"id", s.id},
          {"status", to_string(s.status)},
          {"pending", queue},
          {"query", queue.empty() ? Json(nullptr) : queue.front()}};
}

ProcessConfig config_from(const Json* j, ProcessConfig cfg) {
  if (!j) return cfg;
  if (!j->is_object()) throw Error(ErrorCode::ParseError, "/config: expected an object");
  cfg.max_iter = j->value("max_iter", cfg.max_iter);
  cfg.threshold = j->value("threshold", cfg.threshold);
  cfg.exact_cap = j->value("exact_cap", cfg.exact_cap);
  cfg.seed = j->value("seed", cfg.seed);
  return cfg;
}

void reply(httplib::Response& res, const ServiceResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    return req.body.empty() ? Json::object() : Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    reply(res, error_response(400, "ParseError", e.what()));
    return std::nullopt;
  }
}

std::string request_token(const httplib::Request& req, const Json& body) {
  if (req.has_header("Idempotency-Key")) return req.get_header_value("Idempotency-Key");
  if (body.is_object() && body.contains("token") && body["token"].is_string()) return body["token"].get<std::string>();
  return {};
}

}  // namespace

std::filesystem::path default_store() {
  if (const char* env = std::getenv("DP_STORE"); env && *env) return env;
  return "dp_store";
}

SessionService::SessionService(Config config) : config_(std::move(config)) {
  std::error_code ec;
  std::filesystem::create_directories(config_.store / "sessions", ec);
  if (!ec) std::filesystem::create_directories(config_.store / "models", ec);
  if (ec) throw Error(ErrorCode::StartupError, "store " + config_.store.string() + ": " + ec.message());

  for (const auto& entry : std::filesystem::directory_iterator(config_.store / "sessions")) {
    if (entry.path().extension() != ".json") continue;
    Json j;
    try {
      j = Json::parse(read_file(entry.path()));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::StartupError, entry.path().string() + ": " + e.what());
    }
    auto slot = std::make_shared<Slot>();
    slot->session = session_from_json(j.at("session"));
    for (const auto& [token, r] : j.at("tokens").items()) slot->tokens[token] = response_from(r);
    const std::string& id = slot->session.id;
    if (id.size() > 1 && id[0] == 's' && id.find_first_not_of("0123456789", 1) == std::string::npos)
      next_id_ = std::max(next_id_, std::stoul(id.substr(1)) + 1);
    sessions_[id] = std::move(slot);
  }
  const auto tokens = config_.store / "create_tokens.json";
  if (std::filesystem::exists(tokens))
    for (const auto& [token, r] : Json::parse(read_file(tokens)).items()) create_tokens_[token] = response_from(r);
}

std::filesystem::path SessionService::session_file(const std::string& id) const {
  return config_.store / "sessions" / (id + ".json");
}

std::filesystem::path SessionService::model_file(const std::string& name) const {
  return config_.store / "models" / (name + ".json");
}

void SessionService::persist(const Slot& slot) {
  Json tokens = Json::object();
  for (const auto& [token, r] : slot.tokens) tokens[token] = response_json(r);
  write_file_atomic(session_file(slot.session.id),
                    Json{{"session", session_to_json(slot.session)}, {"tokens", tokens}}.dump(2) + "\n");
}

std::shared_ptr<SessionService::Slot> SessionService::find(const std::string& id) {
  std::shared_lock lock(registry_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

ServiceResponse SessionService::create_session(const Json& body, const std::string& token) {
  std::lock_guard create_lock(create_mutex_);
  if (!token.empty())
    if (auto it = create_tokens_.find(token); it != create_tokens_.end()) return it->second;
  try {
    if (!body.is_object()) throw Error(ErrorCode::ParseError, "/: expected an object");
    Attribute seed;
    ProblemStatement statement;
    ProcessConfig cfg;
    cfg.seed = config_.seed;

    std::optional<ModelDocument> doc;
    if (body.contains("model")) {
      const std::string name = body["model"].get<std::string>();
      if (!valid_name(name) || !std::filesystem::exists(model_file(name))) return not_found("model " + name);
      doc = load_model(model_file(name));
    } else if (body.contains("document")) {
      doc = document_from_json(body["document"]);
    }
    if (doc) {
      if (!doc->formulation || !doc->process)
        throw Error(ErrorCode::InvalidFormulation, "model needs a formulation and a process section");
      const auto& attrs = doc->formulation->attributes;
      auto it = std::find_if(attrs.begin(), attrs.end(),
                             [&](const Attribute& a) { return a.name == doc->process->seed_attribute; });
      if (it == attrs.end())
        throw Error(ErrorCode::UnknownReference, "seed attribute '" + doc->process->seed_attribute + "'");
      seed = *it;
      statement = doc->formulation->statement;
      cfg.max_iter = doc->process->max_iter;
      cfg.threshold = doc->process->threshold;
      cfg.seed = doc->process->seed;
    } else {
      if (!body.contains("seed") || !body.contains("statement"))
        throw Error(ErrorCode::ParseError, "/: expected model, document, or seed and statement");
      seed = attribute_from_json(body["seed"], "/seed");
      statement = statement_from_json(body["statement"], "/statement");
    }
    cfg = config_from(body.contains("config") ? &body["config"] : nullptr, cfg);

    std::unique_lock lock(registry_mutex_);
    std::string id;
    if (body.contains("id")) {
      id = body["id"].get<std::string>();
      if (!valid_name(id)) throw Error(ErrorCode::ParseError, "/id: invalid session id");
      if (sessions_.count(id)) return error_response(409, "Conflict", "session " + id + " exists");
    } else {
      do id = "s" + std::to_string(next_id_++);
      while (sessions_.count(id));
    }
    auto slot = std::make_shared<Slot>();
    slot->session = init_session(seed, statement, cfg, id);
    persist(*slot);
    sessions_[id] = slot;
    ServiceResponse r{201, {{"id", id}, {"session", session_to_json(slot->session)}}};
    if (!token.empty()) {
      create_tokens_[token] = r;
      Json all = Json::object();
      for (const auto& [t, resp] : create_tokens_) all[t] = response_json(resp);
      write_file_atomic(config_.store / "create_tokens.json", all.dump(2) + "\n");
    }
    return r;
  } catch (const Error& e) {
    return error_response(e);
  } catch (const Json::exception& e) {
    return error_response(400, "ParseError", e.what());
  }
}

ServiceResponse SessionService::get_session(const std::string& id) {
  auto slot = find(id);
  if (!slot) return not_found("session " + id);
  std::lock_guard lock(slot->mutex);
  return {200, session_to_json(slot->session)};
}

ServiceResponse SessionService::pending(const std::string& id) {
  auto slot = find(id);
  if (!slot) return not_found("session " + id);
  std::lock_guard lock(slot->mutex);
  return {200, pending_view(slot->session)};
}

ServiceResponse SessionService::answer(const std::string& id, const Json& body, const std::string& token) {
  auto slot = find(id);
  if (!slot) return not_found("session " + id);
  std::lock_guard lock(slot->mutex);
  if (!token.empty())
    if (auto it = slot->tokens.find(token); it != slot->tokens.end()) return it->second;
  if (!body.is_object() || !body.contains("key") || !body["key"].is_string() || !body.contains("answer"))
    return error_response(400, "ParseError", "expected {\"key\": string, \"answer\": value}");
  try {
    Session next = slot->session;
    apply_step(next, body["key"].get<std::string>(), body["answer"]);
    slot->session = std::move(next);
  } catch (const Error& e) {
    ServiceResponse r = error_response(e);
    if (!slot->session.pending.empty()) r.body["expected"] = slot->session.pending.front().key;
    return r;
  }
  ServiceResponse r{200, pending_view(slot->session)};
  if (!token.empty()) slot->tokens[token] = r;
  persist(*slot);
  return r;
}

ServiceResponse SessionService::partition(const std::string& id) {
  auto slot = find(id);
  if (!slot) return not_found("session " + id);
  std::lock_guard lock(slot->mutex);
  const Session& s = slot->session;
  if (!s.partition) return not_found("no partition yet for session " + id);
  Json body{{"id", s.id},
            {"status", to_string(s.status)},
            {"iteration", s.status == SessionStatus::running ? s.iteration() : s.history.size()},
            {"partition", to_json(*s.partition)}};
  if (s.partition->ordered()) body["rendered"] = render_order(*s.partition);
  return {200, body};
}

ServiceResponse SessionService::get_model(const std::string& name) {
  if (!valid_name(name) || !std::filesystem::exists(model_file(name))) return not_found("model " + name);
  try {
    return {200, to_json(load_model(model_file(name)))};
  } catch (const Error& e) {
    return error_response(e);
  }
}

ServiceResponse SessionService::put_model(const std::string& name, const Json& body) {
  if (!valid_name(name)) return error_response(400, "ParseError", "invalid model name");
  try {
    const ModelDocument doc = document_from_json(body);
    save_model(doc, model_file(name));
    return {200, {{"name", name}, {"version", doc.version}}};
  } catch (const Error& e) {
    return error_response(e);
  }
}

void SessionService::mount(httplib::Server& server) {
  server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) reply(res, create_session(*body, request_token(req, *body)));
  });
  server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, get_session(req.matches[1]));
  });
  server.Get(R"(/sessions/([^/]+)/pending)", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, pending(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/answers)", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) reply(res, answer(req.matches[1], *body, request_token(req, *body)));
  });
  server.Get(R"(/sessions/([^/]+)/partition)", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, partition(req.matches[1]));
  });
  server.Get(R"(/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, get_model(req.matches[1]));
  });
  server.Put(R"(/models/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) reply(res, put_model(req.matches[1], *body));
  });
}

ServiceHost::ServiceHost(SessionService& service) : server_(std::make_unique<httplib::Server>()) {
  service.mount(*server_);
  exclusive_port(*server_);
}

ServiceHost::~ServiceHost() { stop(); }

int ServiceHost::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::StartupError, "cannot bind " + host);
  } else if (!server_->bind_to_port(host, port)) {
    throw Error(ErrorCode::StartupError, "cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void ServiceHost::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void serve(SessionService& service, const std::string& host, int port) {
  httplib::Server server;
  service.mount(server);
  exclusive_port(server);
  if (!server.bind_to_port(host, port))
    throw Error(ErrorCode::StartupError, "cannot bind " + host + ":" + std::to_string(port));
  server.listen_after_bind();
}

}  // namespace dp
