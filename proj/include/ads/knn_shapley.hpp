#pragma once

#include "ads/dataset.hpp"
#include "ads/groups.hpp"
#include "ads/knn_utility.hpp"
#include "ads/report.hpp"

#include <map>
#include <span>
#include <vector>

namespace ads {

/// Neighbor structure of one group for one test point.
///   current[i]  element of C_t that is the (i+1)-th nearest within C_t
///   counts[i]   c_{t,i+1}: elements of P_t ranked strictly before current[i]
///   prior       P_t in nearest-first order, possibly truncated to its first K
///   prior_size  m(P_t)
/// Elements are positions in the caller's prior/current lists.
struct NeighborRanking {
  std::vector<std::size_t> current;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> prior;
  std::size_t prior_size = 0;
};

/// Ranks P_t and C_t against one test point with a single merged sort. The
/// order is (distance, instance-id rank, position in prior ++ current).
NeighborRanking precedence_counts(const InstanceTable& table, std::span<const InstanceIndex> prior,
                                  std::span<const InstanceIndex> current, const Instance& test, const KnnConfig& cfg);

enum class BaseBranch { kOutOfReach, kPriorExhausted, kPriorDisplaced };
enum class StepCase { kBeyondK, kEqualCounts, kIncreasingBelowK, kCrossingK };

/// Which base-value branch applies to the farthest in-group instance.
BaseBranch classify_base(std::size_t c_max, std::size_t prior_size, int k);

/// Which recurrence case relates the i-th and (i+1)-th in-group instances;
/// guards are tested in the order 1, 2, 3, 4.
StepCase classify_step(std::size_t c_i, std::size_t c_next, int k);

/// ADS value of the farthest in-group instance. current_labels and
/// prior_labels are in rank order (prior_labels may be truncated to K).
double knn_ads_base_value(const NeighborRanking& ranking, std::span<const int> current_labels,
                          std::span<const int> prior_labels, int k, int y_test);

/// value of the i-th nearest in-group instance (1 <= i < m(C_t)) from the
/// value of the (i+1)-th.
double knn_ads_step(std::size_t i, const NeighborRanking& ranking, std::span<const int> current_labels,
                    std::span<const int> prior_labels, int k, int y_test, double value_next);

/// One training-instance occurrence: instance `instance` as part of source `source`.
struct Occurrence {
  SourceIndex source = 0;
  InstanceIndex instance = 0;
};

/// Instance-level ADS values, one per occurrence (sources in index order,
/// instances in source order).
struct InstanceValuation {
  std::vector<Occurrence> occurrences;
  Eigen::VectorXd values;
};

std::vector<Occurrence> occurrences_of(const SourcePool& pool);

/// Exact ADS of every occurrence at one test point for the fixed-K
/// normalized KNN game. O(n log n) for the ranking plus a linear recurrence
/// per group.
InstanceValuation knn_ads_per_test_point(const OrderedGroups& groups, const SourcePool& pool, const Instance& test,
                                         const KnnConfig& cfg);

/// Instance values averaged over the test set.
InstanceValuation knn_ads_instances(const OrderedGroups& groups, const SourcePool& pool,
                                    const InstanceTable& test_set, const KnnConfig& cfg, std::size_t threads = 1);

/// KNN-ADS report: instance values averaged over the test set, summed to
/// sources, then to contributors. Group residuals are checked against the
/// fixed-K KNN utility.
ValuationReport knn_ads(const OrderedGroups& groups, const SourcePool& pool, const InstanceTable& test_set,
                        const KnnConfig& cfg, std::size_t threads = 1,
                        const std::map<SourceId, ContributorId>* ownership = nullptr);

/// Per-case hit counters, for coverage checks of the recurrence.
struct KnnCaseCounts {
  std::size_t base[3] = {0, 0, 0};
  std::size_t step[4] = {0, 0, 0, 0};
};

/// Same as knn_ads_per_test_point, additionally tallying the applied cases.
InstanceValuation knn_ads_per_test_point(const OrderedGroups& groups, const SourcePool& pool, const Instance& test,
                                         const KnnConfig& cfg, KnnCaseCounts& counts);

}  // namespace ads
