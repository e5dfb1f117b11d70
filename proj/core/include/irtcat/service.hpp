#pragma once

// HTTP-independent request handlers for the test part (examinee sessions)
// and the admin part (item bank maintenance, termination settings,
// exposure statistics, difficulty calibration). HttpServer maps routes
// onto these; tests may call them directly.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "irtcat/bank_store.hpp"
#include "irtcat/serialization.hpp"
#include "irtcat/session.hpp"

namespace irtcat {

struct ActivationWindow {
  /// Epoch seconds; an unset bound is open-ended.
  std::optional<std::int64_t> opens_at;
  std::optional<std::int64_t> closes_at;

  bool contains(std::int64_t now) const;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path bank_path;
  /// Session snapshots are written here when set.
  std::optional<std::filesystem::path> session_dir;
  /// Static web client served at "/" when set.
  std::optional<std::filesystem::path> static_dir;
  std::string admin_token;
  TerminationConfig termination;
  SelectionStrategy strategy;
  ActivationWindow window;
  /// Write admin bank edits back to bank_path.
  bool persist_bank = true;
};

/// Reads a JSON config file. Relative paths resolve against the file's
/// directory.
ServiceConfig load_service_config(const std::filesystem::path& path);
ServiceConfig service_config_from_json(const json& j, const std::filesystem::path& base_dir = {});

/// IRTCAT_BIND ("host:port" or ":port"), IRTCAT_BANK and IRTCAT_ADMIN_TOKEN
/// override the corresponding fields.
void apply_env_overrides(ServiceConfig& config,
                         const std::function<const char*(const char*)>& getenv_fn = [](const char* name) {
                           return std::getenv(name);
                         });

struct ApiResponse {
  int status = 200;
  json body;
};

class CatService {
 public:
  /// Loads the bank from config.bank_path.
  explicit CatService(ServiceConfig config);
  CatService(ServiceConfig config, ItemBank bank);

  CatService(const CatService&) = delete;
  CatService& operator=(const CatService&) = delete;

  // Test part.
  ApiResponse create_session(const json& body);
  ApiResponse get_session(const std::string& id);
  ApiResponse submit_answer(const std::string& id, const json& body);
  ApiResponse get_report(const std::string& id);

  // Admin part. Callers check authorized() first.
  bool authorized(std::string_view token) const;
  ApiResponse list_items() const;
  ApiResponse get_item(ItemId id) const;
  ApiResponse create_item(const json& body);
  ApiResponse update_item(ItemId id, const json& body);
  ApiResponse delete_item(ItemId id);
  ApiResponse get_config() const;
  ApiResponse put_config(const json& body);
  ApiResponse exposure_stats() const;
  ApiResponse calibrate(const std::string& log_text) const;
  /// Full snapshot, including the theta trajectory.
  ApiResponse admin_session(const std::string& id);

  std::shared_ptr<const ItemBank> bank() const;
  const ServiceConfig& config() const { return config_; }

  /// Replaces the wall clock used for the activation window (tests).
  void set_clock(std::function<std::int64_t()> now) { now_ = std::move(now); }

 private:
  struct CachedAnswer {
    ItemId item_id;
    std::vector<int> selection;
    ApiResponse response;
  };

  struct Slot {
    std::mutex mutex;
    TestSession session;
    std::optional<CachedAnswer> last_answer;
  };

  std::shared_ptr<Slot> find_slot(const std::string& id);
  void persist(const TestSession& session);
  json session_view(const TestSession& session, const ItemBank& bank) const;
  ApiResponse commit_bank(ItemBank updated, int success_status, json success_body);
  std::string new_session_id();

  ServiceConfig config_;
  std::optional<SessionStore> store_;

  // Bank snapshots are immutable; edits publish a new snapshot. The edit
  // lock excludes session creation but not in-flight answers.
  mutable std::mutex bank_pointer_mutex_;
  std::shared_ptr<const ItemBank> bank_;
  mutable std::shared_mutex bank_edit_mutex_;

  mutable std::mutex settings_mutex_;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;

  std::mutex id_mutex_;
  std::mt19937_64 id_rng_;

  std::function<std::int64_t()> now_;
};

/// Binds CatService to HTTP routes.
class HttpServer {
 public:
  explicit HttpServer(CatService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to host:port (port 0 picks a free port) and returns the port,
  /// or -1 on failure.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace irtcat
