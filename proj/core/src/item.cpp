#include "irtcat/item.hpp"

#include <algorithm>
#include <utility>

namespace irtcat {

const Item* ItemBank::find(ItemId id) const {
  const auto it = std::find_if(items.begin(), items.end(), [id](const Item& item) { return item.id == id; });
  return it == items.end() ? nullptr : &*it;
}

Item* ItemBank::find(ItemId id) {
  return const_cast<Item*>(std::as_const(*this).find(id));
}

}  // namespace irtcat
