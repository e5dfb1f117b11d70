#include "irtcat/errors.hpp"

#include <sstream>

namespace irtcat {

namespace {

std::string describe_missing(const std::vector<int>& levels) {
  std::ostringstream out;
  out << "bank has no active item at difficulty level(s)";
  for (int level : levels) out << ' ' << level;
  return out.str();
}

}  // namespace

InsufficientBankError::InsufficientBankError(std::vector<int> missing_levels)
    : std::runtime_error(describe_missing(missing_levels)), missing_levels_(std::move(missing_levels)) {}

}  // namespace irtcat
