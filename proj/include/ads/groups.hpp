#pragma once

#include "ads/dataset.hpp"

#include <cstdint>
#include <vector>

namespace ads {

/// Ordered partition (D_1, ..., D_T) of the source set. Groups are stored with
/// 0-based positions; group_number reports the 1-based group number.
class OrderedGroups {
 public:
  OrderedGroups() = default;

  /// Builds and validates a partition of {0, ..., source_count-1}.
  static OrderedGroups from_indices(std::vector<std::vector<SourceIndex>> groups,
                                    std::size_t source_count);

  /// sigma = (D), every source in one group.
  static OrderedGroups single_group(std::size_t source_count);

  std::size_t group_count() const noexcept { return groups_.size(); }
  std::size_t source_count() const noexcept { return group_of_.size(); }
  const std::vector<SourceIndex>& group(std::size_t position) const { return groups_[position]; }
  const std::vector<std::vector<SourceIndex>>& groups() const noexcept { return groups_; }

  /// 1-based group number t such that z is in D_t.
  std::size_t group_number(SourceIndex z) const { return group_of_[z] + 1; }

  /// prod_t |D_t|!, saturating at UINT64_MAX.
  std::uint64_t ordered_permutation_count() const;

 private:
  std::vector<std::vector<SourceIndex>> groups_;  // each sorted
  std::vector<std::size_t> group_of_;
};

/// Validates groups given by source id against the pool. Throws
/// EmptyGroup / OverlappingGroups / UncoveredSource / UnknownSource.
OrderedGroups validate_groups(const std::vector<std::vector<SourceId>>& groups, const SourcePool& pool);

/// U_{t-1}: every source in groups strictly before group t (1-based, 1 <= t <= T).
std::vector<SourceIndex> group_prefix(const OrderedGroups& groups, std::size_t t);

}  // namespace ads
