#include "irtcat/bank_store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "irtcat/calibration.hpp"
#include "irtcat/errors.hpp"
#include "irtcat/serialization.hpp"

namespace irtcat {

namespace {

BankIssue error_issue(std::optional<std::size_t> index, std::optional<ItemId> id, std::string message) {
  return {BankIssue::Severity::Error, index, id, std::move(message)};
}

BankIssue warning_issue(std::optional<std::size_t> index, std::optional<ItemId> id, std::string message) {
  return {BankIssue::Severity::Warning, index, id, std::move(message)};
}

bool is_error(const BankIssue& issue) { return issue.severity == BankIssue::Severity::Error; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string format_number(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

}  // namespace

std::string describe(const BankIssue& issue) {
  std::string text = issue.severity == BankIssue::Severity::Error ? "error" : "warning";
  if (issue.item_id) text += ": item " + std::to_string(*issue.item_id);
  if (issue.index) text += " (#" + std::to_string(*issue.index) + ")";
  return text + ": " + issue.message;
}

BankValidationError::BankValidationError(std::vector<BankIssue> issues)
    : std::runtime_error([&] {
        std::string text = "invalid item bank";
        for (const auto& issue : issues) {
          if (is_error(issue)) text += "\n  " + describe(issue);
        }
        return text;
      }()),
      issues_(std::move(issues)) {}

std::vector<BankIssue> validate_item(const Item& item) {
  std::vector<BankIssue> issues;
  const auto add_error = [&](std::string message) { issues.push_back(error_issue({}, item.id, std::move(message))); };

  if (auto problem = check_parameters(item.params); !problem.empty()) add_error(problem);
  if (item.stem.empty()) add_error("stem must not be empty");
  if (item.level < 1 || item.level > kLevelCount) add_error("level must be in 1..5");

  const auto n_options = static_cast<int>(item.options.size());
  const auto n_correct = static_cast<int>(item.correct_options.size());
  bool structure_ok = true;
  for (int index : item.correct_options) {
    if (index < 0 || index >= n_options) {
      add_error("correct option index " + std::to_string(index) + " is outside the " + std::to_string(n_options) +
                " options");
      structure_ok = false;
    }
  }
  if (std::set<int>(item.correct_options.begin(), item.correct_options.end()).size() != item.correct_options.size()) {
    add_error("correct option indices must be unique");
    structure_ok = false;
  } else if (!std::is_sorted(item.correct_options.begin(), item.correct_options.end())) {
    add_error("correct option indices must be ascending");
  }
  if (n_correct < 1 || n_correct >= n_options) {
    add_error("need at least one correct option and at least one incorrect option");
    structure_ok = false;
  }

  if (std::isfinite(item.params.b) && !in_practical_range(item.params)) {
    issues.push_back(warning_issue({}, item.id, "difficulty b = " + format_number(item.params.b) +
                                                    " is outside the practical range [-3, 3]"));
  }
  if (structure_ok && !item.guessing_override) {
    const double expected = guessing_from_structure(n_options, n_correct);
    if (std::abs(item.params.c - expected) > 1e-9) {
      issues.push_back(warning_issue({}, item.id,
                                     "guessing c = " + format_number(item.params.c) + " does not match " +
                                         std::to_string(n_correct) + " correct of " + std::to_string(n_options) +
                                         " options; suggested c = " + format_number(expected) +
                                         " (or set guessing_override)"));
    }
  }
  return issues;
}

std::vector<BankIssue> validate_bank(const ItemBank& bank) {
  std::vector<BankIssue> issues;
  if (bank.version != kBankFormatVersion) {
    issues.push_back(error_issue({}, {}, "unsupported format version " + std::to_string(bank.version)));
  }
  if (!(bank.D > 0) || !std::isfinite(bank.D)) issues.push_back(error_issue({}, {}, "D must be positive"));

  std::set<ItemId> seen;
  for (std::size_t i = 0; i < bank.items.size(); ++i) {
    const auto& item = bank.items[i];
    if (!seen.insert(item.id).second) issues.push_back(error_issue(i, item.id, "duplicate item id"));
    if (item.params.D != bank.D) issues.push_back(error_issue(i, item.id, "item scale D differs from the bank's"));
    for (auto issue : validate_item(item)) {
      issue.index = i;
      issues.push_back(std::move(issue));
    }
  }
  return issues;
}

LoadedBank parse_bank(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw BankParseError(std::string("bank is not valid JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw BankParseError("bank document must be a JSON object", 0);
  if (doc.value("format", std::string()) != kBankFormatName) {
    throw BankParseError(std::string("bank document must declare \"format\": \"") + kBankFormatName + "\"", 0);
  }
  const auto version = doc.find("version");
  if (version == doc.end() || !version->is_number_integer()) {
    throw BankParseError("bank document lacks an integer \"version\"", 0);
  }
  if (version->get<int>() != kBankFormatVersion) {
    throw UnknownVersionError("unknown bank format version " + version->dump());
  }

  LoadedBank loaded;
  std::vector<BankIssue> issues;
  const auto D = doc.find("D");
  if (D == doc.end() || !D->is_number()) {
    issues.push_back(error_issue({}, {}, "missing numeric \"D\""));
  } else {
    loaded.bank.D = D->get<double>();
  }
  const auto items = doc.find("items");
  if (items == doc.end() || !items->is_array()) {
    issues.push_back(error_issue({}, {}, "missing \"items\" array"));
  } else {
    for (std::size_t i = 0; i < items->size(); ++i) {
      const auto& entry = (*items)[i];
      try {
        loaded.bank.items.push_back(item_from_json(entry, loaded.bank.D));
      } catch (const std::invalid_argument& e) {
        std::optional<ItemId> id;
        if (entry.is_object() && entry.contains("id") && entry["id"].is_number_unsigned()) {
          id = entry["id"].get<ItemId>();
        }
        issues.push_back(error_issue(i, id, e.what()));
      }
    }
  }
  for (auto& issue : validate_bank(loaded.bank)) issues.push_back(std::move(issue));

  if (std::any_of(issues.begin(), issues.end(), is_error)) throw BankValidationError(std::move(issues));
  loaded.warnings = std::move(issues);
  return loaded;
}

LoadedBank load_bank(const std::filesystem::path& path) { return parse_bank(read_file(path)); }

std::string serialize_bank(const ItemBank& bank) {
  json items = json::array();
  for (const auto& item : bank.items) items.push_back(to_json(item));
  const json doc{{"format", kBankFormatName}, {"version", bank.version}, {"D", bank.D}, {"items", std::move(items)}};
  return doc.dump(2) + "\n";
}

void save_bank(const ItemBank& bank, const std::filesystem::path& path) {
  auto issues = validate_bank(bank);
  if (std::any_of(issues.begin(), issues.end(), is_error)) throw BankValidationError(std::move(issues));
  write_file_atomically(path, serialize_bank(bank));
}

SessionStore::SessionStore(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::filesystem::create_directories(directory_);
}

std::filesystem::path SessionStore::path_for(const std::string& id) const {
  const bool safe = !id.empty() && id.size() <= 128 && std::all_of(id.begin(), id.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_';
  });
  if (!safe) throw NotFoundError("no session with id '" + id + "'");
  return directory_ / (id + ".json");
}

void SessionStore::persist(const TestSession& session) {
  const auto path = path_for(session.id);
  const auto text = to_json(session).dump(2) + "\n";
  std::unique_lock lock(mutex_);
  write_file_atomically(path, text);
}

TestSession SessionStore::load(const std::string& id) const {
  const auto path = path_for(id);
  std::string text;
  {
    std::shared_lock lock(mutex_);
    if (!std::filesystem::exists(path)) throw NotFoundError("no session with id '" + id + "'");
    text = read_file(path);
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CorruptedRecordError("session '" + id + "' is not valid JSON: " + e.what());
  }
  auto session = session_from_json(doc);
  if (session.id != id) throw CorruptedRecordError("session file '" + id + "' holds session '" + session.id + "'");
  return session;
}

bool SessionStore::contains(const std::string& id) const {
  try {
    const auto path = path_for(id);
    std::shared_lock lock(mutex_);
    return std::filesystem::exists(path);
  } catch (const NotFoundError&) {
    return false;
  }
}

std::vector<std::string> SessionStore::ids() const {
  std::vector<std::string> ids;
  std::shared_lock lock(mutex_);
  for (const auto& entry : std::filesystem::directory_iterator(directory_)) {
    if (entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace irtcat
