#include "ads/utility.hpp"

#include "ads/error.hpp"

#include <algorithm>
#include <cmath>

namespace ads {

TableUtility::TableUtility(std::size_t players, std::vector<double> table, double range_bound)
    : players_(players), table_(std::move(table)), range_(range_bound) {
  if (players_ > 30 || table_.size() != (std::size_t{1} << players_)) {
    throw Error(ErrorCode::kDimensionMismatch, "table game needs 2^n entries for n <= 30");
  }
}

double TableUtility::value(Coalition coalition) const {
  std::uint32_t mask = 0;
  for (auto z : coalition) {
    if (z >= players_) throw Error(ErrorCode::kUnknownSource, "player " + std::to_string(z));
    mask |= std::uint32_t{1} << z;
  }
  return table_[mask];
}

double AdditiveUtility::range_bound() const {
  std::size_t widest = 0;
  for (const auto& s : pool_.sources()) widest = std::max(widest, s.instances.size());
  return static_cast<double>(widest);
}

std::size_t CachedUtility::KeyHash::operator()(const std::vector<SourceIndex>& key) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto z : key) {
    h ^= z + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

double CachedUtility::value(Coalition coalition) const {
  std::vector<SourceIndex> key(coalition.begin(), coalition.end());
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const double v = base_.value(coalition);
  std::lock_guard lock(mutex_);
  ++misses_;
  if (cache_.size() >= capacity_) cache_.clear();
  cache_.emplace(std::move(key), v);
  return v;
}

std::size_t CachedUtility::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

std::vector<SourceIndex> with_source(Coalition coalition, SourceIndex z) {
  std::vector<SourceIndex> out;
  out.reserve(coalition.size() + 1);
  auto pos = std::lower_bound(coalition.begin(), coalition.end(), z);
  out.insert(out.end(), coalition.begin(), pos);
  out.push_back(z);
  out.insert(out.end(), pos, coalition.end());
  return out;
}

double marginal_contribution(const Utility& v, SourceIndex z, Coalition subset) {
  if (std::binary_search(subset.begin(), subset.end(), z)) {
    throw Error(ErrorCode::kSourceInSubset, "source index " + std::to_string(z));
  }
  const auto joined = with_source(subset, z);
  return v.value(joined) - v.value(subset);
}

}  // namespace ads
