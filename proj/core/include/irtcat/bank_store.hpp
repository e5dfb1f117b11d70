#pragma once

// Item bank files and session snapshots on disk.

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "irtcat/item.hpp"
#include "irtcat/session.hpp"

namespace irtcat {

inline constexpr int kBankFormatVersion = 1;
inline constexpr const char* kBankFormatName = "irtcat-bank";

struct BankIssue {
  enum class Severity { Error, Warning };

  Severity severity = Severity::Error;
  /// Position of the item in the file, when the issue concerns one.
  std::optional<std::size_t> index;
  std::optional<ItemId> item_id;
  std::string message;
};

std::string describe(const BankIssue& issue);

/// Every invariant violation of the bank, errors and warnings alike.
std::vector<BankIssue> validate_bank(const ItemBank& bank);
std::vector<BankIssue> validate_item(const Item& item);

class BankParseError : public std::runtime_error {
 public:
  BankParseError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class BankValidationError : public std::runtime_error {
 public:
  explicit BankValidationError(std::vector<BankIssue> issues);
  const std::vector<BankIssue>& issues() const { return issues_; }

 private:
  std::vector<BankIssue> issues_;
};

class UnknownVersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedBank {
  ItemBank bank;
  std::vector<BankIssue> warnings;
};

LoadedBank parse_bank(const std::string& text);
LoadedBank load_bank(const std::filesystem::path& path);

/// Canonical form: fixed field order, two-space indent, UTF-8, trailing
/// newline.
std::string serialize_bank(const ItemBank& bank);
/// Throws BankValidationError for an invalid bank, std::runtime_error on
/// I/O failure. The file is replaced atomically.
void save_bank(const ItemBank& bank, const std::filesystem::path& path);

/// One JSON snapshot per session under a directory. Writes are exclusive,
/// reads shared; snapshots are replaced atomically.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path directory);

  void persist(const TestSession& session);
  /// Throws NotFoundError or CorruptedRecordError.
  TestSession load(const std::string& id) const;
  bool contains(const std::string& id) const;
  std::vector<std::string> ids() const;

  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path path_for(const std::string& id) const;

  std::filesystem::path directory_;
  mutable std::shared_mutex mutex_;
};

}  // namespace irtcat
