#include "irtcat/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>

#include "irtcat/calibration.hpp"
#include "irtcat/errors.hpp"
#include "irtcat/simulator.hpp"

namespace irtcat {

namespace {

ApiResponse error_response(int status, std::string code, std::string message, json extra = json::object()) {
  json body{{"error", std::move(code)}, {"message", std::move(message)}};
  for (auto& [key, value] : extra.items()) body[key] = value;
  return {status, std::move(body)};
}

json issues_json(const std::vector<BankIssue>& issues) {
  json details = json::array();
  for (const auto& issue : issues) {
    json entry{{"severity", issue.severity == BankIssue::Severity::Error ? "error" : "warning"},
               {"message", issue.message}};
    if (issue.item_id) entry["item_id"] = *issue.item_id;
    details.push_back(std::move(entry));
  }
  return details;
}

bool has_errors(const std::vector<BankIssue>& issues) {
  return std::any_of(issues.begin(), issues.end(),
                     [](const BankIssue& i) { return i.severity == BankIssue::Severity::Error; });
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::int64_t wall_clock_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

bool ActivationWindow::contains(std::int64_t now) const {
  if (opens_at && now < *opens_at) return false;
  if (closes_at && now >= *closes_at) return false;
  return true;
}

ServiceConfig service_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw std::invalid_argument("service config must be a JSON object");
  ServiceConfig config;
  if (j.contains("bind")) {
    const auto bind = j["bind"].get<std::string>();
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos) throw std::invalid_argument("bind must look like host:port");
    if (colon > 0) config.host = bind.substr(0, colon);
    config.port = std::stoi(bind.substr(colon + 1));
  }
  if (j.contains("bank")) config.bank_path = resolve(base_dir, j["bank"].get<std::string>());
  if (j.contains("session_dir")) config.session_dir = resolve(base_dir, j["session_dir"].get<std::string>());
  if (j.contains("static_dir")) config.static_dir = resolve(base_dir, j["static_dir"].get<std::string>());
  config.admin_token = j.value("admin_token", std::string());
  if (j.contains("termination")) config.termination = termination_config_from_json(j["termination"]);
  if (j.contains("strategy")) config.strategy = strategy_from_json(j["strategy"]);
  if (j.contains("activation_window")) {
    const auto& w = j["activation_window"];
    if (w.contains("opens_at") && !w["opens_at"].is_null()) config.window.opens_at = w["opens_at"].get<std::int64_t>();
    if (w.contains("closes_at") && !w["closes_at"].is_null()) {
      config.window.closes_at = w["closes_at"].get<std::int64_t>();
    }
  }
  config.persist_bank = j.value("persist_bank", true);
  if (auto problem = check_config(config.termination); !problem.empty()) throw std::invalid_argument(problem);
  return config;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  const auto doc = json::parse(in);
  return service_config_from_json(doc, path.parent_path());
}

void apply_env_overrides(ServiceConfig& config, const std::function<const char*(const char*)>& getenv_fn) {
  if (const char* bind = getenv_fn("IRTCAT_BIND"); bind != nullptr && *bind != '\0') {
    const std::string value(bind);
    const auto colon = value.rfind(':');
    if (colon == std::string::npos) throw std::invalid_argument("IRTCAT_BIND must look like host:port");
    if (colon > 0) config.host = value.substr(0, colon);
    config.port = std::stoi(value.substr(colon + 1));
  }
  if (const char* bank = getenv_fn("IRTCAT_BANK"); bank != nullptr && *bank != '\0') config.bank_path = bank;
  if (const char* token = getenv_fn("IRTCAT_ADMIN_TOKEN"); token != nullptr) config.admin_token = token;
}

CatService::CatService(ServiceConfig config) : CatService(config, load_bank(config.bank_path).bank) {}

CatService::CatService(ServiceConfig config, ItemBank bank)
    : config_(std::move(config)),
      bank_(std::make_shared<const ItemBank>(std::move(bank))),
      id_rng_(std::random_device{}()),
      now_(wall_clock_seconds) {
  if (config_.session_dir) store_.emplace(*config_.session_dir);
}

std::shared_ptr<const ItemBank> CatService::bank() const {
  std::lock_guard lock(bank_pointer_mutex_);
  return bank_;
}

std::string CatService::new_session_id() {
  std::lock_guard lock(id_mutex_);
  for (;;) {
    char buffer[20];
    std::snprintf(buffer, sizeof buffer, "s%016llx", static_cast<unsigned long long>(id_rng_()));
    std::string id(buffer);
    std::shared_lock sessions(sessions_mutex_);
    if (!sessions_.contains(id) && !(store_ && store_->contains(id))) return id;
  }
}

std::shared_ptr<CatService::Slot> CatService::find_slot(const std::string& id) {
  {
    std::shared_lock lock(sessions_mutex_);
    if (const auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  }
  if (!store_ || !store_->contains(id)) return nullptr;
  auto restored = store_->load(id);
  std::unique_lock lock(sessions_mutex_);
  auto& slot = sessions_[id];
  if (!slot) {
    slot = std::make_shared<Slot>();
    slot->session = std::move(restored);
  }
  return slot;
}

void CatService::persist(const TestSession& session) {
  if (store_) store_->persist(session);
}

json CatService::session_view(const TestSession& session, const ItemBank& bank) const {
  json view{{"session_id", session.id},
            {"examinee_id", session.examinee_id},
            {"phase", std::string(to_string(session.phase))},
            {"progress",
             {{"answered", session.administered.size()},
              {"warmup_size", session.warmup_plan.size()},
              {"adaptive_answered", session.adaptive_count()},
              {"max_adaptive", session.config.max_items}}}};
  const Item* pending = session.pending ? bank.find(*session.pending) : nullptr;
  view["item"] = pending != nullptr ? to_public_json(*pending) : json(nullptr);
  if (session.phase == Phase::Finished) view["report"] = to_json(make_report(session));
  return view;
}

ApiResponse CatService::create_session(const json& body) {
  if (!body.is_object() || !body.contains("examinee_id") || !body["examinee_id"].is_string() ||
      body["examinee_id"].get<std::string>().empty()) {
    return error_response(400, "malformed_request", "body must be an object with a non-empty examinee_id");
  }
  std::uint64_t seed = 0;
  if (body.contains("seed")) {
    const auto& value = body["seed"];
    if (!value.is_number_integer() || (!value.is_number_unsigned() && value.get<std::int64_t>() < 0)) {
      return error_response(400, "malformed_request", "seed must be a non-negative integer");
    }
    seed = body["seed"].get<std::uint64_t>();
  } else {
    std::lock_guard lock(id_mutex_);
    seed = id_rng_();
  }

  TerminationConfig termination;
  SelectionStrategy strategy;
  ActivationWindow window;
  {
    std::lock_guard lock(settings_mutex_);
    termination = config_.termination;
    strategy = config_.strategy;
    window = config_.window;
  }
  if (!window.contains(now_())) return error_response(403, "test_not_open", "the test is outside its activation window");

  std::shared_lock edit_lock(bank_edit_mutex_);
  const auto current = bank();
  auto slot = std::make_shared<Slot>();
  try {
    slot->session = start_session(*current, termination, strategy, seed, new_session_id(),
                                  body["examinee_id"].get<std::string>());
  } catch (const InsufficientBankError& e) {
    return error_response(409, "insufficient_bank", e.what(), {{"missing_levels", e.missing_levels()}});
  }
  const auto& session = slot->session;
  {
    std::unique_lock lock(sessions_mutex_);
    sessions_[session.id] = slot;
  }
  persist(session);
  return {201, session_view(session, *current)};
}

ApiResponse CatService::get_session(const std::string& id) {
  const auto slot = find_slot(id);
  if (!slot) return error_response(404, "unknown_session", "no session with id '" + id + "'");
  std::lock_guard lock(slot->mutex);
  return {200, session_view(slot->session, *bank())};
}

ApiResponse CatService::submit_answer(const std::string& id, const json& body) {
  const auto slot = find_slot(id);
  if (!slot) return error_response(404, "unknown_session", "no session with id '" + id + "'");
  if (!body.is_object() || !body.contains("item_id") || !body["item_id"].is_number_unsigned() ||
      !body.contains("selected") || !body["selected"].is_array()) {
    return error_response(400, "malformed_request", "body needs item_id and a selected array");
  }
  const auto item_id = body["item_id"].get<ItemId>();
  std::vector<int> selection;
  for (const auto& index : body["selected"]) {
    if (!index.is_number_integer()) return error_response(400, "malformed_request", "selected must hold integers");
    selection.push_back(index.get<int>());
  }
  std::sort(selection.begin(), selection.end());
  selection.erase(std::unique(selection.begin(), selection.end()), selection.end());

  std::lock_guard lock(slot->mutex);
  auto& session = slot->session;
  if (slot->last_answer && slot->last_answer->item_id == item_id && slot->last_answer->selection == selection) {
    return slot->last_answer->response;
  }
  if (session.phase == Phase::Finished) return error_response(410, "session_finished", "the session has finished");
  if (!session.pending || *session.pending != item_id) {
    return error_response(409, "out_of_order", "item " + std::to_string(item_id) + " is not the pending item",
                          {{"pending_item_id", session.pending ? json(*session.pending) : json(nullptr)}});
  }
  const auto current = bank();
  const Item* item = current->find(item_id);
  if (item == nullptr) return error_response(409, "item_unavailable", "the pending item was removed from the bank");
  for (int index : selection) {
    if (index < 0 || index >= static_cast<int>(item->options.size())) {
      return error_response(400, "malformed_request", "selected option index out of range");
    }
  }
  const int u = selection == item->correct_options ? 1 : 0;

  const auto step = irtcat::submit_answer(session, *current, item_id, u);
  ApiResponse response;
  if (const auto* finished = std::get_if<Finished>(&step)) {
    response.body = {{"status", "finished"}, {"session_id", session.id}, {"report", to_json(finished->report)}};
  } else {
    response.body = session_view(session, *current);
    response.body["status"] = "next";
  }
  slot->last_answer = CachedAnswer{item_id, selection, response};
  persist(session);
  return response;
}

ApiResponse CatService::get_report(const std::string& id) {
  const auto slot = find_slot(id);
  if (!slot) return error_response(404, "unknown_session", "no session with id '" + id + "'");
  std::lock_guard lock(slot->mutex);
  if (slot->session.phase != Phase::Finished) {
    return error_response(409, "not_finished", "the report is available once the test has finished");
  }
  return {200, to_json(make_report(slot->session))};
}

bool CatService::authorized(std::string_view token) const {
  return !config_.admin_token.empty() && token == config_.admin_token;
}

ApiResponse CatService::list_items() const {
  const auto current = bank();
  json items = json::array();
  for (const auto& item : current->items) items.push_back(to_json(item));
  return {200, {{"D", current->D}, {"items", std::move(items)}}};
}

ApiResponse CatService::get_item(ItemId id) const {
  const auto current = bank();
  const Item* item = current->find(id);
  if (item == nullptr) return error_response(404, "unknown_item", "no item " + std::to_string(id));
  return {200, to_json(*item)};
}

ApiResponse CatService::commit_bank(ItemBank updated, int success_status, json success_body) {
  auto issues = validate_bank(updated);
  if (has_errors(issues)) return error_response(422, "validation", "the bank would become invalid", {{"details", issues_json(issues)}});
  if (config_.persist_bank && !config_.bank_path.empty()) save_bank(updated, config_.bank_path);
  {
    std::lock_guard lock(bank_pointer_mutex_);
    bank_ = std::make_shared<const ItemBank>(std::move(updated));
  }
  json warnings = json::array();
  for (const auto& issue : issues) warnings.push_back(issue.message);
  if (success_body.is_object() && !warnings.empty()) success_body["warnings"] = std::move(warnings);
  return {success_status, std::move(success_body)};
}

ApiResponse CatService::create_item(const json& body) {
  std::unique_lock edit_lock(bank_edit_mutex_);
  ItemBank updated = *bank();
  json entry = body;
  if (!entry.is_object()) return error_response(400, "malformed_request", "item must be a JSON object");
  if (!entry.contains("id")) {
    ItemId next = 1;
    for (const auto& item : updated.items) next = std::max(next, item.id + 1);
    entry["id"] = next;
  }
  Item item;
  try {
    item = item_from_json(entry, updated.D);
  } catch (const std::invalid_argument& e) {
    return error_response(422, "validation", e.what());
  }
  if (updated.find(item.id) != nullptr) {
    return error_response(409, "duplicate_item", "item " + std::to_string(item.id) + " already exists");
  }
  if (auto issues = validate_item(item); has_errors(issues)) {
    return error_response(422, "validation", "invalid item", {{"details", issues_json(issues)}});
  }
  updated.items.push_back(item);
  return commit_bank(std::move(updated), 201, to_json(item));
}

ApiResponse CatService::update_item(ItemId id, const json& body) {
  std::unique_lock edit_lock(bank_edit_mutex_);
  ItemBank updated = *bank();
  Item* existing = updated.find(id);
  if (existing == nullptr) return error_response(404, "unknown_item", "no item " + std::to_string(id));
  if (!body.is_object()) return error_response(400, "malformed_request", "item must be a JSON object");
  json entry = body;
  if (entry.contains("id") && entry["id"] != json(id)) {
    return error_response(422, "validation", "item id in the body does not match the path");
  }
  entry["id"] = id;
  Item item;
  try {
    item = item_from_json(entry, updated.D);
  } catch (const std::invalid_argument& e) {
    return error_response(422, "validation", e.what());
  }
  if (auto issues = validate_item(item); has_errors(issues)) {
    return error_response(422, "validation", "invalid item", {{"details", issues_json(issues)}});
  }
  *existing = item;
  return commit_bank(std::move(updated), 200, to_json(item));
}

ApiResponse CatService::delete_item(ItemId id) {
  std::unique_lock edit_lock(bank_edit_mutex_);
  ItemBank updated = *bank();
  if (updated.find(id) == nullptr) return error_response(404, "unknown_item", "no item " + std::to_string(id));

  int active_sessions = 0;
  {
    std::shared_lock lock(sessions_mutex_);
    for (const auto& [_, slot] : sessions_) {
      std::lock_guard slot_lock(slot->mutex);
      const auto& s = slot->session;
      if (s.phase == Phase::Finished) continue;
      const bool uses = (s.pending && *s.pending == id) ||
                        std::find(s.warmup_plan.begin(), s.warmup_plan.end(), id) != s.warmup_plan.end() ||
                        std::any_of(s.administered.begin(), s.administered.end(),
                                    [id](const AdministeredItem& a) { return a.id == id; });
      if (uses) ++active_sessions;
    }
  }
  if (active_sessions > 0) {
    return error_response(409, "item_in_use", "item is used by active sessions", {{"active_sessions", active_sessions}});
  }
  std::erase_if(updated.items, [id](const Item& item) { return item.id == id; });
  return commit_bank(std::move(updated), 200, {{"deleted", id}});
}

ApiResponse CatService::get_config() const {
  std::lock_guard lock(settings_mutex_);
  json window{{"opens_at", config_.window.opens_at ? json(*config_.window.opens_at) : json(nullptr)},
              {"closes_at", config_.window.closes_at ? json(*config_.window.closes_at) : json(nullptr)}};
  return {200,
          {{"termination", to_json(config_.termination)},
           {"strategy", to_json(config_.strategy)},
           {"activation_window", std::move(window)}}};
}

ApiResponse CatService::put_config(const json& body) {
  if (!body.is_object()) return error_response(400, "malformed_request", "config must be a JSON object");
  {
    std::lock_guard lock(settings_mutex_);
    TerminationConfig termination = config_.termination;
    SelectionStrategy strategy = config_.strategy;
    ActivationWindow window = config_.window;
    try {
      // Termination fields may be nested or given at the top level.
      if (body.contains("termination")) termination = termination_config_from_json(body["termination"], termination);
      termination = termination_config_from_json(body, termination);
      if (body.contains("strategy")) strategy = strategy_from_json(body["strategy"], strategy);
      if (body.contains("activation_window")) {
        const auto& w = body["activation_window"];
        if (!w.is_object()) throw std::invalid_argument("activation_window must be an object");
        if (w.contains("opens_at")) {
          window.opens_at = w["opens_at"].is_null() ? std::nullopt
                                                    : std::optional<std::int64_t>(w["opens_at"].get<std::int64_t>());
        }
        if (w.contains("closes_at")) {
          window.closes_at = w["closes_at"].is_null()
                                 ? std::nullopt
                                 : std::optional<std::int64_t>(w["closes_at"].get<std::int64_t>());
        }
      }
    } catch (const std::exception& e) {
      return error_response(422, "validation", e.what());
    }
    if (auto problem = check_config(termination); !problem.empty()) return error_response(422, "validation", problem);
    config_.termination = termination;
    config_.strategy = strategy;
    config_.window = window;
  }
  return get_config();
}

ApiResponse CatService::exposure_stats() const {
  const auto current = bank();
  std::map<ItemId, int> counts;
  for (const auto& item : current->items) counts[item.id] = 0;
  int n_sessions = 0;
  int total = 0;
  {
    std::shared_lock lock(sessions_mutex_);
    for (const auto& [_, slot] : sessions_) {
      std::lock_guard slot_lock(slot->mutex);
      if (slot->session.phase != Phase::Finished) continue;
      ++n_sessions;
      for (const auto& a : slot->session.administered) {
        ++counts[a.id];
        ++total;
      }
    }
  }
  json rows = json::array();
  for (const auto& [id, count] : counts) rows.push_back({{"id", id}, {"count", count}});
  return {200,
          {{"n_sessions", n_sessions},
           {"total_administered", total},
           {"sigma", population_sigma(counts)},
           {"counts", std::move(rows)}}};
}

ApiResponse CatService::calibrate(const std::string& log_text) const {
  std::vector<ResponseLogRecord> log;
  try {
    log = parse_response_log_text(log_text);
    const auto estimation = estimate_difficulty(first_answers(log));
    std::map<ItemId, int> levels;
    for (const auto& item : bank()->items) levels[item.id] = item.level;
    const auto report = calibration_report(levels, estimation.estimates);
    return {200, {{"estimation", to_json(estimation)}, {"comparison", to_json(report)}}};
  } catch (const AmbiguousLogError& e) {
    return error_response(422, "ambiguous_log", e.what());
  } catch (const NoOverlapError& e) {
    return error_response(422, "no_overlap", e.what());
  } catch (const std::invalid_argument& e) {
    return error_response(422, "invalid_log", e.what());
  }
}

ApiResponse CatService::admin_session(const std::string& id) {
  const auto slot = find_slot(id);
  if (!slot) return error_response(404, "unknown_session", "no session with id '" + id + "'");
  std::lock_guard lock(slot->mutex);
  return {200, to_json(slot->session)};
}

}  // namespace irtcat
