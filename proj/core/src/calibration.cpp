#include "irtcat/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <tuple>

#include "irtcat/errors.hpp"

namespace irtcat {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view field, int line_no, const char* name) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": invalid " + name + " '" +
                                std::string(field) + "'");
  }
  return value;
}

void require_level(int level) {
  if (level < 1 || level > kLevelCount) {
    throw std::invalid_argument("difficulty level must be in 1.." + std::to_string(kLevelCount));
  }
}

}  // namespace

double guessing_from_structure(int n_options, int n_correct) {
  if (n_correct < 1 || n_correct >= n_options) {
    throw std::invalid_argument("need 1 <= correct answers < options, got " + std::to_string(n_correct) + " of " +
                                std::to_string(n_options));
  }
  // C(n, k) built incrementally; every partial product is an exact binomial.
  const int k = std::min(n_correct, n_options - n_correct);
  double subsets = 1.0;
  for (int i = 1; i <= k; ++i) subsets = subsets * (n_options - k + i) / i;
  return 1.0 / std::round(subsets);
}

double level_to_b(int level) {
  require_level(level);
  return -3.0 + 1.5 * (level - 1);
}

double level_to_unit(int level) {
  require_level(level);
  return (level - 1) / 4.0;
}

double unit_to_ability(double x) { return 6.0 * x - 3.0; }

std::vector<ResponseLogRecord> parse_response_log(std::istream& in) {
  std::vector<ResponseLogRecord> records;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split_fields(view);
    if (!header_seen) {
      if (fields.size() != 4 || fields[0] != "user_id" || fields[1] != "item_id" || fields[2] != "correct" ||
          fields[3] != "timestamp") {
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": expected header 'user_id,item_id,correct,timestamp'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                                  std::to_string(fields.size()));
    }
    ResponseLogRecord record;
    record.user_id = std::string(fields[0]);
    if (record.user_id.empty()) throw std::invalid_argument("line " + std::to_string(line_no) + ": empty user_id");
    record.item_id = parse_number<ItemId>(fields[1], line_no, "item_id");
    record.correct = parse_number<int>(fields[2], line_no, "correct");
    if (record.correct != 0 && record.correct != 1) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": correct must be 0 or 1");
    }
    record.timestamp = parse_number<std::int64_t>(fields[3], line_no, "timestamp");
    records.push_back(std::move(record));
  }
  if (!header_seen) throw std::invalid_argument("response log is missing its header row");
  return records;
}

std::vector<ResponseLogRecord> parse_response_log_text(const std::string& text) {
  std::istringstream in(text);
  return parse_response_log(in);
}

std::vector<ResponseLogRecord> first_answer_records(const std::vector<ResponseLogRecord>& log) {
  std::vector<const ResponseLogRecord*> sorted;
  sorted.reserve(log.size());
  for (const auto& r : log) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const ResponseLogRecord* x, const ResponseLogRecord* y) {
    return std::tie(x->item_id, x->user_id, x->timestamp) < std::tie(y->item_id, y->user_id, y->timestamp);
  });

  std::vector<ResponseLogRecord> firsts;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& r = *sorted[i];
    if (i > 0) {
      const auto& prev = *sorted[i - 1];
      if (prev.item_id == r.item_id && prev.user_id == r.user_id) {
        if (prev.timestamp == r.timestamp) {
          throw AmbiguousLogError("user '" + r.user_id + "' has two answers to item " + std::to_string(r.item_id) +
                                  " at timestamp " + std::to_string(r.timestamp));
        }
        continue;
      }
    }
    firsts.push_back(r);
  }
  std::stable_sort(firsts.begin(), firsts.end(), [](const ResponseLogRecord& x, const ResponseLogRecord& y) {
    return std::tie(x.item_id, x.timestamp, x.user_id) < std::tie(y.item_id, y.timestamp, y.user_id);
  });
  return firsts;
}

std::map<ItemId, std::vector<int>> first_answers(const std::vector<ResponseLogRecord>& log) {
  std::map<ItemId, std::vector<int>> grouped;
  for (const auto& r : first_answer_records(log)) grouped[r.item_id].push_back(r.correct);
  return grouped;
}

DifficultyEstimation estimate_difficulty(const std::map<ItemId, std::vector<int>>& firsts) {
  DifficultyEstimation result;
  for (const auto& [id, answers] : firsts) {
    if (answers.empty()) {
      result.skipped.push_back(id);
      continue;
    }
    const auto incorrect = std::count(answers.begin(), answers.end(), 0);
    DifficultyEstimate e;
    e.item_id = id;
    e.n_first_answers = static_cast<int>(answers.size());
    e.p_incorrect = static_cast<double>(incorrect) / static_cast<double>(answers.size());
    e.b_estimate = unit_to_ability(e.p_incorrect);
    e.low_confidence = e.n_first_answers < kLowConfidenceSample;
    result.estimates.push_back(e);
  }
  return result;
}

CalibrationReport calibration_report(const std::map<ItemId, int>& original_levels,
                                     const std::vector<DifficultyEstimate>& estimates, double flag_threshold) {
  CalibrationReport report;
  for (const auto& e : estimates) {
    const auto it = original_levels.find(e.item_id);
    if (it == original_levels.end()) continue;
    CalibrationRow row;
    row.item_id = e.item_id;
    row.level = it->second;
    row.original = level_to_unit(it->second);
    row.estimated = e.p_incorrect;
    row.discrepancy = row.estimated - row.original;
    row.flagged = std::abs(row.discrepancy) > flag_threshold;
    report.rows.push_back(row);
  }
  if (report.rows.empty()) throw NoOverlapError("no item appears in both the bank and the estimates");

  std::sort(report.rows.begin(), report.rows.end(),
            [](const CalibrationRow& x, const CalibrationRow& y) { return x.item_id < y.item_id; });
  double original_sum = 0.0;
  double estimated_sum = 0.0;
  std::vector<const CalibrationRow*> flagged;
  for (const auto& row : report.rows) {
    original_sum += row.original;
    estimated_sum += row.estimated;
    if (row.flagged) flagged.push_back(&row);
  }
  const auto n = static_cast<double>(report.rows.size());
  report.original_mean = original_sum / n;
  report.estimated_mean = estimated_sum / n;

  std::stable_sort(flagged.begin(), flagged.end(), [](const CalibrationRow* x, const CalibrationRow* y) {
    return std::abs(x->discrepancy) > std::abs(y->discrepancy);
  });
  for (const auto* row : flagged) report.flagged.push_back(row->item_id);
  return report;
}

}  // namespace irtcat
