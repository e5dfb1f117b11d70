#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irtcat/irt.hpp"

namespace irtcat {

using ItemId = std::uint32_t;

inline constexpr int kLevelCount = 5;

/// An authored test item. `params.D` mirrors the owning bank's scale factor.
struct Item {
  ItemId id = 0;
  std::string stem;
  std::vector<std::string> options;
  /// Zero-based, ascending, unique.
  std::vector<int> correct_options;
  /// Tutor-assigned difficulty, 1 (very easy) to 5 (very difficult).
  int level = 3;
  std::string topic;
  ItemParameters params;
  /// Set when `params.c` deliberately differs from the option structure.
  bool guessing_override = false;
  bool active = true;

  friend bool operator==(const Item&, const Item&) = default;
};

struct ItemBank {
  int version = 1;
  double D = kDefaultScale;
  std::vector<Item> items;

  const Item* find(ItemId id) const;
  Item* find(ItemId id);

  friend bool operator==(const ItemBank&, const ItemBank&) = default;
};

}  // namespace irtcat
