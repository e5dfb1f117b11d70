#include "irtcat/serialization.hpp"

#include <sstream>
#include <stdexcept>
#include <string>

#include "irtcat/errors.hpp"

namespace irtcat {

namespace {

template <typename T>
T required(const json& j, const char* name) {
  if (!j.is_object()) throw std::invalid_argument("expected an object");
  const auto it = j.find(name);
  if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("field '") + name + "' has the wrong type");
  }
}

template <typename T>
T optional_field(const json& j, const char* name, T fallback) {
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("field '") + name + "' has the wrong type");
  }
}

json nullable(const std::optional<double>& value) { return value ? json(*value) : json(nullptr); }

}  // namespace

json to_json(const Item& item) {
  return json{{"id", item.id},
              {"stem", item.stem},
              {"options", item.options},
              {"correct", item.correct_options},
              {"level", item.level},
              {"topic", item.topic},
              {"a", item.params.a},
              {"b", item.params.b},
              {"c", item.params.c},
              {"guessing_override", item.guessing_override},
              {"active", item.active}};
}

Item item_from_json(const json& j, double D) {
  Item item;
  item.id = required<ItemId>(j, "id");
  item.stem = required<std::string>(j, "stem");
  item.options = required<std::vector<std::string>>(j, "options");
  item.correct_options = required<std::vector<int>>(j, "correct");
  item.level = required<int>(j, "level");
  item.topic = optional_field<std::string>(j, "topic", "");
  item.guessing_override = optional_field<bool>(j, "guessing_override", false);
  item.active = optional_field<bool>(j, "active", true);

  // Omitted parameters take the tutor defaults: a = 1, b from the level,
  // c from the option structure.
  double default_b = 0.0;
  if (item.level >= 1 && item.level <= kLevelCount) default_b = level_to_b(item.level);
  double default_c = 0.0;
  const auto n_options = static_cast<int>(item.options.size());
  const auto n_correct = static_cast<int>(item.correct_options.size());
  if (n_correct >= 1 && n_correct < n_options) default_c = guessing_from_structure(n_options, n_correct);
  item.params.a = optional_field<double>(j, "a", 1.0);
  item.params.b = optional_field<double>(j, "b", default_b);
  item.params.c = optional_field<double>(j, "c", default_c);
  item.params.D = D;
  return item;
}

json to_public_json(const Item& item) {
  return json{{"id", item.id}, {"stem", item.stem}, {"options", item.options}};
}

json to_json(const TerminationConfig& config) {
  return json{{"max_items", config.max_items},
              {"min_items", config.min_items},
              {"se_threshold", nullable(config.se_threshold)},
              {"theta_guard", config.theta_guard}};
}

TerminationConfig termination_config_from_json(const json& j, const TerminationConfig& base) {
  if (!j.is_object()) throw std::invalid_argument("termination config must be an object");
  TerminationConfig config = base;
  config.max_items = optional_field<int>(j, "max_items", base.max_items);
  config.min_items = optional_field<int>(j, "min_items", base.min_items);
  if (j.contains("se_threshold")) {
    config.se_threshold =
        j["se_threshold"].is_null() ? std::nullopt : std::optional<double>(required<double>(j, "se_threshold"));
  }
  config.theta_guard = optional_field<double>(j, "theta_guard", base.theta_guard);
  return config;
}

json to_json(const SelectionStrategy& strategy) {
  return json{{"kind", std::string(to_string(strategy.kind))}, {"k", strategy.k}, {"epsilon", strategy.epsilon}};
}

SelectionStrategy strategy_from_json(const json& j, const SelectionStrategy& base) {
  if (!j.is_object()) throw std::invalid_argument("strategy must be an object");
  SelectionStrategy strategy = base;
  if (j.contains("kind")) strategy.kind = parse_strategy_kind(required<std::string>(j, "kind"));
  const auto k = optional_field<long long>(j, "k", static_cast<long long>(base.k));
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  strategy.k = static_cast<std::size_t>(k);
  strategy.epsilon = optional_field<double>(j, "epsilon", base.epsilon);
  if (!(strategy.epsilon >= 0)) throw std::invalid_argument("epsilon must be nonnegative");
  return strategy;
}

json to_json(const KnowledgeReport& report) {
  json items = json::array();
  for (const auto& a : report.items) {
    items.push_back({{"id", a.id}, {"level", a.level}, {"b", a.params.b}, {"u", a.u}, {"theta_after", a.theta_after}});
  }
  json levels = json::array();
  for (const auto& [level, summary] : report.levels) {
    levels.push_back({{"level", level},
                      {"administered", summary.administered},
                      {"n_correct", summary.correct},
                      {"ratio", summary.ratio}});
  }
  return json{{"theta", report.theta},
              {"se", nullable(report.se)},
              {"finish_reason", std::string(to_string(report.finish_reason))},
              {"items", std::move(items)},
              {"levels", std::move(levels)}};
}

json to_json(const ExposureReport& report) {
  json reasons = json::object();
  for (const auto& [reason, count] : report.finish_reasons) reasons[std::string(to_string(reason))] = count;
  json counts = json::array();
  for (const auto& [id, count] : report.counts) counts.push_back({{"id", id}, {"count", count}});
  return json{{"strategy", to_json(report.strategy)},
              {"seed", report.seed},
              {"n_examinees", report.n_examinees},
              {"total_administered", report.total_administered},
              {"sigma", report.sigma},
              {"finish_reasons", std::move(reasons)},
              {"counts", std::move(counts)}};
}

json to_json(const DifficultyEstimation& estimation) {
  json estimates = json::array();
  for (const auto& e : estimation.estimates) {
    estimates.push_back({{"id", e.item_id},
                         {"p_incorrect", e.p_incorrect},
                         {"n_first_answers", e.n_first_answers},
                         {"b_estimate", e.b_estimate},
                         {"low_confidence", e.low_confidence}});
  }
  return json{{"estimates", std::move(estimates)}, {"skipped", estimation.skipped}};
}

json to_json(const CalibrationReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"id", r.item_id},
                    {"level", r.level},
                    {"original", r.original},
                    {"estimated", r.estimated},
                    {"discrepancy", r.discrepancy},
                    {"flagged", r.flagged}});
  }
  return json{{"original_mean", report.original_mean},
              {"estimated_mean", report.estimated_mean},
              {"flagged", report.flagged},
              {"rows", std::move(rows)}};
}

json to_json(const TestSession& session) {
  json administered = json::array();
  for (const auto& a : session.administered) {
    administered.push_back({{"id", a.id},
                            {"level", a.level},
                            {"a", a.params.a},
                            {"b", a.params.b},
                            {"c", a.params.c},
                            {"D", a.params.D},
                            {"u", a.u},
                            {"theta_after", a.theta_after}});
  }
  std::ostringstream rng_state;
  rng_state << session.rng;
  return json{{"format", "irtcat-session"},
              {"version", 1},
              {"id", session.id},
              {"examinee_id", session.examinee_id},
              {"phase", std::string(to_string(session.phase))},
              {"warmup_plan", session.warmup_plan},
              {"administered", std::move(administered)},
              {"pending", session.pending ? json(*session.pending) : json(nullptr)},
              {"theta", session.theta},
              {"se", nullable(session.se)},
              {"diverged", session.diverged},
              {"config", to_json(session.config)},
              {"strategy", to_json(session.strategy)},
              {"seed", session.seed},
              {"rng_state", rng_state.str()},
              {"finish_reason", session.finish_reason ? json(std::string(to_string(*session.finish_reason)))
                                                      : json(nullptr)}};
}

TestSession session_from_json(const json& j) {
  try {
    if (required<std::string>(j, "format") != "irtcat-session" || required<int>(j, "version") != 1) {
      throw std::invalid_argument("unrecognized snapshot format");
    }
    TestSession session;
    session.id = required<std::string>(j, "id");
    session.examinee_id = required<std::string>(j, "examinee_id");
    session.phase = parse_phase(required<std::string>(j, "phase"));
    session.warmup_plan = required<std::vector<ItemId>>(j, "warmup_plan");
    for (const auto& a : required<json>(j, "administered")) {
      AdministeredItem item;
      item.id = required<ItemId>(a, "id");
      item.level = required<int>(a, "level");
      item.params = {required<double>(a, "a"), required<double>(a, "b"), required<double>(a, "c"),
                     required<double>(a, "D")};
      item.u = required<int>(a, "u");
      item.theta_after = required<double>(a, "theta_after");
      if (item.u != 0 && item.u != 1) throw std::invalid_argument("response must be 0 or 1");
      session.administered.push_back(item);
    }
    if (!j.at("pending").is_null()) session.pending = required<ItemId>(j, "pending");
    session.theta = required<double>(j, "theta");
    if (!j.at("se").is_null()) session.se = required<double>(j, "se");
    session.diverged = required<bool>(j, "diverged");
    session.config = termination_config_from_json(required<json>(j, "config"));
    session.strategy = strategy_from_json(required<json>(j, "strategy"));
    session.seed = required<std::uint64_t>(j, "seed");
    std::istringstream rng_state(required<std::string>(j, "rng_state"));
    rng_state >> session.rng;
    if (rng_state.fail()) throw std::invalid_argument("unreadable generator state");
    if (!j.at("finish_reason").is_null()) {
      session.finish_reason = parse_finish_reason(required<std::string>(j, "finish_reason"));
    }
    if ((session.phase == Phase::Finished) != session.finish_reason.has_value()) {
      throw std::invalid_argument("phase and finish reason disagree");
    }
    return session;
  } catch (const std::exception& e) {
    throw CorruptedRecordError(std::string("corrupted session snapshot: ") + e.what());
  }
}

}  // namespace irtcat
