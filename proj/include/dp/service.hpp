#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>

#include "dp/oracle.hpp"
#include "dp/process.hpp"

namespace httplib {
class Server;
}

namespace dp {

/// Storage directory from DP_STORE, else "./dp_store".
std::filesystem::path default_store();

struct ServiceResponse {
  int status = 200;
  Json body;
};

/// Session and model endpoints over a directory store. Sessions live in
/// <store>/sessions/<id>.json, models in <store>/models/<name>.json; every
/// mutation is written before it is acknowledged. Mutations carrying a
/// request token replay the stored response when the token repeats.
class SessionService {
 public:
  struct Config {
    std::filesystem::path store = default_store();
    /// Seed for heuristic solvers in new sessions.
    std::uint64_t seed = 1;
  };

  /// Loads every persisted session. Throws StartupError when the store is
  /// not writable.
  explicit SessionService(Config config);

  /// Body: {"model": name} or {"document": model} (with a process section),
  /// or {"seed": attribute, "statement": statement}; optional "config" and "id".
  ServiceResponse create_session(const Json& body, const std::string& token = {});
  ServiceResponse get_session(const std::string& id);
  ServiceResponse pending(const std::string& id);
  /// Body: {"key": query key, "answer": answer}.
  ServiceResponse answer(const std::string& id, const Json& body, const std::string& token = {});
  ServiceResponse partition(const std::string& id);
  ServiceResponse get_model(const std::string& name);
  ServiceResponse put_model(const std::string& name, const Json& body);

  /// Routes the endpoints on `server`.
  void mount(httplib::Server& server);

  const Config& config() const noexcept { return config_; }

 private:
  struct Slot {
    std::mutex mutex;
    Session session;
    std::map<std::string, ServiceResponse> tokens;
  };

  std::shared_ptr<Slot> find(const std::string& id);
  void persist(const Slot& slot);
  std::filesystem::path session_file(const std::string& id) const;
  std::filesystem::path model_file(const std::string& name) const;

  Config config_;
  std::shared_mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::size_t next_id_ = 1;
  std::mutex create_mutex_;
  std::map<std::string, ServiceResponse> create_tokens_;
};

/// Owns an httplib server running on a background thread.
class ServiceHost {
 public:
  explicit ServiceHost(SessionService& service);
  ~ServiceHost();
  ServiceHost(const ServiceHost&) = delete;
  ServiceHost& operator=(const ServiceHost&) = delete;

  /// Binds host:port (port 0 picks a free one) and starts serving; returns
  /// the bound port. Throws StartupError when binding fails.
  int start(const std::string& host, int port);
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

/// Blocks serving on host:port. Throws StartupError when binding fails.
void serve(SessionService& service, const std::string& host, int port);

}  // namespace dp
