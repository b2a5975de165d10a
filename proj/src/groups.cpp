#include "ads/groups.hpp"

#include "ads/error.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace ads {
namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ",";
    out += s;
  }
  return out;
}

}  // namespace

OrderedGroups OrderedGroups::from_indices(std::vector<std::vector<SourceIndex>> groups,
                                          std::size_t source_count) {
  constexpr auto kUnassigned = std::numeric_limits<std::size_t>::max();
  OrderedGroups out;
  out.group_of_.assign(source_count, kUnassigned);
  std::vector<std::string> overlapping;
  for (std::size_t t = 0; t < groups.size(); ++t) {
    if (groups[t].empty()) throw Error(ErrorCode::kEmptyGroup, "group index " + std::to_string(t + 1));
    for (auto z : groups[t]) {
      if (z >= source_count) throw Error(ErrorCode::kUnknownSource, "source index " + std::to_string(z));
      if (out.group_of_[z] != kUnassigned) {
        overlapping.push_back(std::to_string(z));
        continue;
      }
      out.group_of_[z] = t;
    }
    std::sort(groups[t].begin(), groups[t].end());
  }
  if (!overlapping.empty()) throw Error(ErrorCode::kOverlappingGroups, "source index " + join(overlapping));
  std::vector<std::string> uncovered;
  for (std::size_t z = 0; z < source_count; ++z) {
    if (out.group_of_[z] == kUnassigned) uncovered.push_back(std::to_string(z));
  }
  if (!uncovered.empty()) throw Error(ErrorCode::kUncoveredSource, "source index " + join(uncovered));
  out.groups_ = std::move(groups);
  return out;
}

OrderedGroups OrderedGroups::single_group(std::size_t source_count) {
  std::vector<SourceIndex> all(source_count);
  for (std::size_t z = 0; z < source_count; ++z) all[z] = z;
  return from_indices({std::move(all)}, source_count);
}

std::uint64_t OrderedGroups::ordered_permutation_count() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (const auto& g : groups_) {
    for (std::uint64_t k = 2; k <= g.size(); ++k) {
      if (total > kMax / k) return kMax;
      total *= k;
    }
  }
  return total;
}

OrderedGroups validate_groups(const std::vector<std::vector<SourceId>>& groups, const SourcePool& pool) {
  std::vector<std::string> overlapping;
  std::vector<std::vector<SourceIndex>> indices(groups.size());
  std::vector<int> seen(pool.size(), 0);
  for (std::size_t t = 0; t < groups.size(); ++t) {
    if (groups[t].empty()) throw Error(ErrorCode::kEmptyGroup, "group index " + std::to_string(t + 1));
    for (const auto& id : groups[t]) {
      if (!pool.contains(id)) throw Error(ErrorCode::kUnknownSource, id);
      const auto z = pool.index_of(id);
      if (seen[z]++ > 0) {
        overlapping.push_back(id);
        continue;
      }
      indices[t].push_back(z);
    }
  }
  if (!overlapping.empty()) throw Error(ErrorCode::kOverlappingGroups, join(overlapping));
  std::vector<std::string> uncovered;
  for (SourceIndex z = 0; z < pool.size(); ++z) {
    if (seen[z] == 0) uncovered.push_back(pool.source(z).id);
  }
  if (!uncovered.empty()) throw Error(ErrorCode::kUncoveredSource, join(uncovered));
  return OrderedGroups::from_indices(std::move(indices), pool.size());
}

std::vector<SourceIndex> group_prefix(const OrderedGroups& groups, std::size_t t) {
  if (t < 1 || t > groups.group_count()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "group " + std::to_string(t) + " of " + std::to_string(groups.group_count()));
  }
  std::vector<SourceIndex> prefix;
  for (std::size_t j = 0; j + 1 < t; ++j) {
    prefix.insert(prefix.end(), groups.group(j).begin(), groups.group(j).end());
  }
  std::sort(prefix.begin(), prefix.end());
  return prefix;
}

}  // namespace ads
