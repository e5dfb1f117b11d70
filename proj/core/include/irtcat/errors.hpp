#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace irtcat {

/// Information sum vanished during ability estimation.
class DegenerateInformationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No candidate items left to select from.
class PoolExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The bank cannot supply a warmup item for every difficulty level.
class InsufficientBankError : public std::runtime_error {
 public:
  explicit InsufficientBankError(std::vector<int> missing_levels);
  const std::vector<int>& missing_levels() const { return missing_levels_; }

 private:
  std::vector<int> missing_levels_;
};

/// An answer was submitted for an item that is not the pending one.
class OutOfOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SessionFinishedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two log records share the same (user, item, timestamp) key.
class AmbiguousLogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoOverlapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorruptedRecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace irtcat
