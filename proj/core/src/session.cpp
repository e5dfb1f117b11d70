#include "irtcat/session.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "irtcat/errors.hpp"

namespace irtcat {

namespace {

std::vector<Response> responses_of(const TestSession& session) {
  std::vector<Response> responses;
  responses.reserve(session.administered.size());
  for (const auto& a : session.administered) responses.push_back({a.params, a.u});
  return responses;
}

std::optional<double> information_se(const TestSession& session) {
  double info = 0.0;
  for (const auto& a : session.administered) info += item_information(a.params, session.theta);
  return standard_error(info);
}

Step advance(TestSession& session, const ItemBank& bank) {
  if (const auto reason = check_termination(session, bank)) {
    session.phase = Phase::Finished;
    session.finish_reason = reason;
    session.pending.reset();
    return Finished{make_report(session)};
  }
  const auto pool = remaining_pool(session, bank);
  const ItemId next = select_next(pool, session.theta, session.strategy, session.rng);
  session.pending = next;
  return NextItem{next};
}

}  // namespace

std::string check_config(const TerminationConfig& config) {
  if (config.max_items < 1) return "max_items must be at least 1";
  if (config.min_items < 0) return "min_items must be nonnegative";
  if (config.min_items > config.max_items) return "min_items must not exceed max_items";
  if (config.se_threshold && !(*config.se_threshold > 0)) return "se_threshold must be positive";
  if (!(config.theta_guard > 0) || !std::isfinite(config.theta_guard)) return "theta_guard must be positive";
  return {};
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Warmup:
      return "Warmup";
    case Phase::Adaptive:
      return "Adaptive";
    case Phase::Finished:
      return "Finished";
  }
  return "unknown";
}

std::string_view to_string(FinishReason reason) {
  switch (reason) {
    case FinishReason::MaxItems:
      return "MaxItems";
    case FinishReason::ThetaOutOfRange:
      return "ThetaOutOfRange";
    case FinishReason::SeReached:
      return "SeReached";
    case FinishReason::PoolExhausted:
      return "PoolExhausted";
  }
  return "unknown";
}

Phase parse_phase(std::string_view text) {
  for (auto p : {Phase::Warmup, Phase::Adaptive, Phase::Finished}) {
    if (to_string(p) == text) return p;
  }
  throw std::invalid_argument("unknown phase '" + std::string(text) + "'");
}

FinishReason parse_finish_reason(std::string_view text) {
  for (auto r : {FinishReason::MaxItems, FinishReason::ThetaOutOfRange, FinishReason::SeReached,
                 FinishReason::PoolExhausted}) {
    if (to_string(r) == text) return r;
  }
  throw std::invalid_argument("unknown finish reason '" + std::string(text) + "'");
}

int TestSession::adaptive_count() const {
  return std::max(0, static_cast<int>(administered.size()) - static_cast<int>(warmup_plan.size()));
}

int TestSession::correct_count() const {
  return static_cast<int>(std::count_if(administered.begin(), administered.end(),
                                        [](const AdministeredItem& a) { return a.u == 1; }));
}

double initial_theta(int correct_count) {
  if (correct_count < 0 || correct_count > kWarmupSize) {
    throw std::invalid_argument("warmup correct count must be in 0.." + std::to_string(kWarmupSize));
  }
  return -2.5 + correct_count;
}

TestSession start_session(const ItemBank& bank, const TerminationConfig& config,
                          const SelectionStrategy& strategy, std::uint64_t seed, std::string session_id,
                          std::string examinee_id) {
  if (auto problem = check_config(config); !problem.empty()) throw std::invalid_argument(problem);
  if (strategy.k < 1) throw std::invalid_argument("k must be at least 1");

  std::vector<std::vector<ItemId>> by_level(kLevelCount);
  for (const auto& item : bank.items) {
    if (item.active && item.level >= 1 && item.level <= kLevelCount) by_level[item.level - 1].push_back(item.id);
  }
  std::vector<int> missing;
  for (int level = 1; level <= kLevelCount; ++level) {
    if (by_level[level - 1].empty()) missing.push_back(level);
  }
  if (!missing.empty()) throw InsufficientBankError(std::move(missing));

  TestSession session;
  session.id = std::move(session_id);
  session.examinee_id = std::move(examinee_id);
  session.config = config;
  session.strategy = strategy;
  session.seed = seed;
  session.rng.seed(seed);
  for (auto& ids : by_level) {
    std::sort(ids.begin(), ids.end());
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    session.warmup_plan.push_back(ids[pick(session.rng)]);
  }
  session.pending = session.warmup_plan.front();
  return session;
}

Step submit_answer(TestSession& session, const ItemBank& bank, ItemId item_id, int u) {
  if (session.phase == Phase::Finished) throw SessionFinishedError("session '" + session.id + "' is finished");
  if (u != 0 && u != 1) throw std::invalid_argument("response must be 0 or 1");
  if (!session.pending || *session.pending != item_id) {
    throw OutOfOrderError("item " + std::to_string(item_id) + " is not the pending item");
  }
  const Item* item = bank.find(item_id);
  if (item == nullptr) throw NotFoundError("item " + std::to_string(item_id) + " is no longer in the bank");

  session.administered.push_back({item->id, item->level, item->params, u, session.theta});
  session.pending.reset();

  if (session.phase == Phase::Warmup) {
    const std::size_t answered = session.administered.size();
    if (answered < session.warmup_plan.size()) {
      session.pending = session.warmup_plan[answered];
      return NextItem{*session.pending};
    }
    session.theta = initial_theta(session.correct_count());
    session.se = information_se(session);
    session.administered.back().theta_after = session.theta;
    session.phase = Phase::Adaptive;
    return advance(session, bank);
  }

  const auto responses = responses_of(session);
  EstimationOptions options;
  options.divergence_bound = session.config.theta_guard;
  try {
    const auto estimate = estimate_ability(responses, session.theta, options);
    session.theta = estimate.theta;
    session.se = estimate.standard_error;
    session.diverged = estimate.diverged;
  } catch (const DegenerateInformationError&) {
    session.diverged = true;
    session.se.reset();
  }
  session.administered.back().theta_after = session.theta;
  return advance(session, bank);
}

std::optional<FinishReason> check_termination(const TestSession& session, const ItemBank& bank) {
  const auto& config = session.config;
  if (session.diverged || std::abs(session.theta) > config.theta_guard) return FinishReason::ThetaOutOfRange;
  if (session.adaptive_count() >= config.max_items) return FinishReason::MaxItems;
  if (config.se_threshold && static_cast<int>(session.administered.size()) >= config.min_items && session.se &&
      *session.se <= *config.se_threshold) {
    return FinishReason::SeReached;
  }
  if (remaining_pool(session, bank).empty()) return FinishReason::PoolExhausted;
  return std::nullopt;
}

KnowledgeReport make_report(const TestSession& session) {
  KnowledgeReport report;
  report.theta = session.theta;
  report.se = session.se;
  report.finish_reason = session.finish_reason.value_or(FinishReason::MaxItems);
  report.items = session.administered;
  for (const auto& a : session.administered) {
    auto& level = report.levels[a.level];
    ++level.administered;
    level.correct += a.u;
  }
  for (auto& [_, level] : report.levels) {
    level.ratio = static_cast<double>(level.correct) / level.administered;
  }
  return report;
}

std::vector<PoolItem> remaining_pool(const TestSession& session, const ItemBank& bank) {
  std::vector<PoolItem> pool;
  pool.reserve(bank.items.size());
  for (const auto& item : bank.items) {
    if (!item.active) continue;
    const bool used = std::any_of(session.administered.begin(), session.administered.end(),
                                  [&](const AdministeredItem& a) { return a.id == item.id; });
    if (!used) pool.push_back({item.id, item.params});
  }
  return pool;
}

TestSession replay_session(const TestSession& recorded, const ItemBank& bank) {
  auto session =
      start_session(bank, recorded.config, recorded.strategy, recorded.seed, recorded.id, recorded.examinee_id);
  for (const auto& a : recorded.administered) submit_answer(session, bank, a.id, a.u);
  return session;
}

}  // namespace irtcat
