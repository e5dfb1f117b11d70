#pragma once

// Next-item selection by maximum information, with two randomized
// exposure-control variants: a uniform pick among the k most informative
// items, and the same pick where the k candidates are filled from clusters
// of (numerically) equal information.

#include <cstddef>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "irtcat/irt.hpp"
#include "irtcat/item.hpp"

namespace irtcat {

using Rng = std::mt19937_64;

struct PoolItem {
  ItemId id = 0;
  ItemParameters params;
};

/// Candidate items not yet administered. Ids must be unique.
using ItemPool = std::span<const PoolItem>;

enum class StrategyKind { BestItem, TopKRandom, ClusteredTopKRandom };

std::string_view to_string(StrategyKind kind);
/// Accepts "best", "topk", "cluster" (and the enumerator names).
StrategyKind parse_strategy_kind(std::string_view text);

struct SelectionStrategy {
  StrategyKind kind = StrategyKind::ClusteredTopKRandom;
  std::size_t k = 10;
  /// Relative tolerance under which two information values are equal.
  double epsilon = 1e-9;

  friend bool operator==(const SelectionStrategy&, const SelectionStrategy&) = default;
};

struct InformationCluster {
  /// Information of the cluster's leading (largest) member.
  double information = 0.0;
  std::vector<ItemId> ids;
};

/// Clusters ordered by strictly decreasing information. Every member of a
/// cluster lies within epsilon * information of the leader.
struct InformationClusterSet {
  std::vector<InformationCluster> clusters;
};

/// Maximum-information item; ties go to the lowest id.
/// Throws PoolExhaustedError on an empty pool.
ItemId best_item(ItemPool pool, double theta);

InformationClusterSet cluster_by_information(ItemPool pool, double theta, double epsilon);

/// The min(k, |pool|) items a randomized strategy picks from. For BestItem
/// this is the single best item.
std::vector<ItemId> candidate_set(ItemPool pool, double theta, const SelectionStrategy& strategy,
                                  Rng& rng);

ItemId select_next(ItemPool pool, double theta, const SelectionStrategy& strategy, Rng& rng);

}  // namespace irtcat
