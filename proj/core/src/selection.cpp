#include "irtcat/selection.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "irtcat/errors.hpp"

namespace irtcat {

namespace {

struct Ranked {
  ItemId id;
  double information;
};

// Pool sorted by information descending, lowest id first among equals.
std::vector<Ranked> rank_pool(ItemPool pool, double theta) {
  std::vector<Ranked> ranked;
  ranked.reserve(pool.size());
  for (const auto& item : pool) ranked.push_back({item.id, item_information(item.params, theta)});
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& x, const Ranked& y) {
    if (x.information != y.information) return x.information > y.information;
    return x.id < y.id;
  });
  return ranked;
}

void require_nonempty(ItemPool pool) {
  if (pool.empty()) throw PoolExhaustedError("no items left to select from");
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::BestItem:
      return "best";
    case StrategyKind::TopKRandom:
      return "topk";
    case StrategyKind::ClusteredTopKRandom:
      return "cluster";
  }
  return "unknown";
}

StrategyKind parse_strategy_kind(std::string_view text) {
  if (text == "best" || text == "BestItem") return StrategyKind::BestItem;
  if (text == "topk" || text == "TopKRandom") return StrategyKind::TopKRandom;
  if (text == "cluster" || text == "ClusteredTopKRandom") return StrategyKind::ClusteredTopKRandom;
  throw std::invalid_argument("unknown selection strategy '" + std::string(text) + "'");
}

ItemId best_item(ItemPool pool, double theta) {
  require_nonempty(pool);
  const PoolItem* best = &pool.front();
  double best_info = item_information(best->params, theta);
  for (const auto& item : pool.subspan(1)) {
    const double info = item_information(item.params, theta);
    if (info > best_info || (info == best_info && item.id < best->id)) {
      best = &item;
      best_info = info;
    }
  }
  return best->id;
}

InformationClusterSet cluster_by_information(ItemPool pool, double theta, double epsilon) {
  if (epsilon < 0) throw std::invalid_argument("epsilon must be nonnegative");
  InformationClusterSet result;
  for (const auto& r : rank_pool(pool, theta)) {
    if (result.clusters.empty() ||
        result.clusters.back().information - r.information > epsilon * result.clusters.back().information) {
      result.clusters.push_back({r.information, {}});
    }
    result.clusters.back().ids.push_back(r.id);
  }
  return result;
}

std::vector<ItemId> candidate_set(ItemPool pool, double theta, const SelectionStrategy& strategy, Rng& rng) {
  require_nonempty(pool);
  if (strategy.k < 1) throw std::invalid_argument("k must be at least 1");

  switch (strategy.kind) {
    case StrategyKind::BestItem:
      return {best_item(pool, theta)};

    case StrategyKind::TopKRandom: {
      const auto ranked = rank_pool(pool, theta);
      const std::size_t n = std::min(strategy.k, ranked.size());
      std::vector<ItemId> ids;
      ids.reserve(n);
      for (std::size_t i = 0; i < n; ++i) ids.push_back(ranked[i].id);
      return ids;
    }

    case StrategyKind::ClusteredTopKRandom: {
      const auto clusters = cluster_by_information(pool, theta, strategy.epsilon);
      const std::size_t slots = std::min(strategy.k, pool.size());
      std::vector<ItemId> ids;
      ids.reserve(slots);
      for (const auto& cluster : clusters.clusters) {
        const std::size_t remaining = slots - ids.size();
        if (remaining == 0) break;
        if (cluster.ids.size() <= remaining) {
          ids.insert(ids.end(), cluster.ids.begin(), cluster.ids.end());
        } else {
          std::sample(cluster.ids.begin(), cluster.ids.end(), std::back_inserter(ids), remaining, rng);
          break;
        }
      }
      return ids;
    }
  }
  throw std::invalid_argument("unknown selection strategy");
}

ItemId select_next(ItemPool pool, double theta, const SelectionStrategy& strategy, Rng& rng) {
  const auto candidates = candidate_set(pool, theta, strategy, rng);
  if (candidates.size() == 1) return candidates.front();
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return candidates[pick(rng)];
}

}  // namespace irtcat
