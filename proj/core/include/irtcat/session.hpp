#pragma once

// Adaptive test state machine.
//
// A session first administers a warmup plan of five items, one per
// difficulty level from easiest to hardest. The number of correct warmup
// answers seeds the ability estimate, after which every answer triggers a
// maximum-likelihood re-estimate (warm-started from the current theta), a
// termination check and, if the test goes on, an information-based
// selection from the unadministered active items.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "irtcat/item.hpp"
#include "irtcat/selection.hpp"

namespace irtcat {

inline constexpr int kWarmupSize = kLevelCount;

struct TerminationConfig {
  /// Cap on adaptive items; warmup items are not counted.
  int max_items = 30;
  /// Total answered items required before the SE rule may fire.
  int min_items = 5;
  std::optional<double> se_threshold;
  double theta_guard = 4.0;

  friend bool operator==(const TerminationConfig&, const TerminationConfig&) = default;
};

/// Empty string when valid, else the reason.
std::string check_config(const TerminationConfig& config);

enum class Phase { Warmup, Adaptive, Finished };
enum class FinishReason { MaxItems, ThetaOutOfRange, SeReached, PoolExhausted };

std::string_view to_string(Phase phase);
std::string_view to_string(FinishReason reason);
Phase parse_phase(std::string_view text);
FinishReason parse_finish_reason(std::string_view text);

struct AdministeredItem {
  ItemId id = 0;
  int level = 0;
  /// Parameters at administration time; later bank edits do not rescore.
  ItemParameters params;
  int u = 0;
  /// Ability estimate after this answer was processed.
  double theta_after = 0.0;

  friend bool operator==(const AdministeredItem&, const AdministeredItem&) = default;
};

struct TestSession {
  std::string id;
  std::string examinee_id;
  Phase phase = Phase::Warmup;
  std::vector<ItemId> warmup_plan;
  std::vector<AdministeredItem> administered;
  std::optional<ItemId> pending;
  double theta = 0.0;
  std::optional<double> se;
  /// Set when the latest estimate left the guard band.
  bool diverged = false;
  TerminationConfig config;
  SelectionStrategy strategy;
  std::uint64_t seed = 0;
  Rng rng;
  std::optional<FinishReason> finish_reason;

  int adaptive_count() const;
  int correct_count() const;

  friend bool operator==(const TestSession&, const TestSession&) = default;
};

struct LevelSummary {
  int administered = 0;
  int correct = 0;
  double ratio = 0.0;
};

struct KnowledgeReport {
  double theta = 0.0;
  std::optional<double> se;
  FinishReason finish_reason = FinishReason::MaxItems;
  std::vector<AdministeredItem> items;
  /// Keyed by difficulty level; only levels that were administered appear.
  std::map<int, LevelSummary> levels;
};

struct NextItem {
  ItemId id;
};

struct Finished {
  KnowledgeReport report;
};

using Step = std::variant<NextItem, Finished>;

/// theta0 = -2.5 + correct_count for correct_count in 0..5.
double initial_theta(int correct_count);

/// Creates a session in the warmup phase. The warmup plan holds one active
/// item per level, chosen uniformly within the level from `seed`; the first
/// plan item becomes pending. Throws InsufficientBankError listing every
/// level without an active item.
TestSession start_session(const ItemBank& bank, const TerminationConfig& config,
                          const SelectionStrategy& strategy, std::uint64_t seed, std::string session_id = {},
                          std::string examinee_id = {});

/// Records `u` for the pending item and advances the session.
/// Throws SessionFinishedError, OutOfOrderError, or std::invalid_argument
/// for u outside {0, 1}.
Step submit_answer(TestSession& session, const ItemBank& bank, ItemId item, int u);

/// First matching rule, in order: ThetaOutOfRange, MaxItems, SeReached,
/// PoolExhausted.
std::optional<FinishReason> check_termination(const TestSession& session, const ItemBank& bank);

KnowledgeReport make_report(const TestSession& session);

/// Active bank items the session has not administered yet.
std::vector<PoolItem> remaining_pool(const TestSession& session, const ItemBank& bank);

/// Rebuilds a session from its seed and recorded answers. The result equals
/// the input whenever the bank still holds the administered items unchanged.
TestSession replay_session(const TestSession& recorded, const ItemBank& bank);

}  // namespace irtcat
