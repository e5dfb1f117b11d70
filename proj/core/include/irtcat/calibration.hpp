#pragma once

// Item parameter initialization from item structure, and difficulty
// estimation from self-assessment response logs using each user's first
// answer to an item.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "irtcat/item.hpp"

namespace irtcat {

/// Probability of blindly picking exactly the correct subset:
/// 1 / C(n_options, n_correct). Requires 1 <= n_correct < n_options.
double guessing_from_structure(int n_options, int n_correct);

/// Levels 1..5 spread linearly over [-3, 3].
double level_to_b(int level);

/// Levels 1..5 spread linearly over [0, 1].
double level_to_unit(int level);

/// Affine map of the [0, 1] difficulty scale onto the ability scale, 6x - 3.
double unit_to_ability(double x);

struct ResponseLogRecord {
  std::string user_id;
  ItemId item_id = 0;
  int correct = 0;
  std::int64_t timestamp = 0;

  friend bool operator==(const ResponseLogRecord&, const ResponseLogRecord&) = default;
};

/// Parses the delimited response log: a header row
/// `user_id,item_id,correct,timestamp` followed by one record per line.
/// Blank lines are skipped. Errors carry the 1-based line number.
std::vector<ResponseLogRecord> parse_response_log(std::istream& in);
std::vector<ResponseLogRecord> parse_response_log_text(const std::string& text);

/// The earliest record of every (user, item) pair, ordered by item id,
/// then timestamp, then user id. Throws AmbiguousLogError when two records
/// share (user, item, timestamp).
std::vector<ResponseLogRecord> first_answer_records(const std::vector<ResponseLogRecord>& log);

/// First answers grouped by item, in first_answer_records order.
std::map<ItemId, std::vector<int>> first_answers(const std::vector<ResponseLogRecord>& log);

inline constexpr int kLowConfidenceSample = 5;

struct DifficultyEstimate {
  ItemId item_id = 0;
  double p_incorrect = 0.0;
  int n_first_answers = 0;
  double b_estimate = 0.0;
  /// Fewer than kLowConfidenceSample first answers.
  bool low_confidence = false;
};

struct DifficultyEstimation {
  std::vector<DifficultyEstimate> estimates;
  /// Items present in the input without any first answer.
  std::vector<ItemId> skipped;
};

/// p_incorrect = incorrect / all first answers; b_estimate = 6 p - 3.
DifficultyEstimation estimate_difficulty(const std::map<ItemId, std::vector<int>>& firsts);

struct CalibrationRow {
  ItemId item_id = 0;
  int level = 0;
  double original = 0.0;
  double estimated = 0.0;
  double discrepancy = 0.0;
  bool flagged = false;
};

struct CalibrationReport {
  /// Ordered by item id; only items present in both series.
  std::vector<CalibrationRow> rows;
  double original_mean = 0.0;
  double estimated_mean = 0.0;
  /// Flagged ids, largest absolute discrepancy first.
  std::vector<ItemId> flagged;
};

/// Discrepancies above one level step on the [0, 1] scale are flagged.
inline constexpr double kDefaultFlagThreshold = 0.25;

/// Compares tutor levels (mapped to [0, 1]) with estimated p_incorrect.
/// Throws NoOverlapError when no item appears in both.
CalibrationReport calibration_report(const std::map<ItemId, int>& original_levels,
                                     const std::vector<DifficultyEstimate>& estimates,
                                     double flag_threshold = kDefaultFlagThreshold);

}  // namespace irtcat
