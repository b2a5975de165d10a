#include "ads/dataset.hpp"

#include "ads/error.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace ads {

InstanceTable::InstanceTable(std::vector<std::string> ids, FeatureMatrix features,
                             std::vector<int> labels)
    : ids_(std::move(ids)), features_(std::move(features)), labels_(std::move(labels)) {
  if (static_cast<std::size_t>(features_.rows()) != ids_.size() || labels_.size() != ids_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "instance table has " + std::to_string(ids_.size()) + " ids, " +
                    std::to_string(features_.rows()) + " feature rows and " +
                    std::to_string(labels_.size()) + " labels");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw Error(ErrorCode::kParseError, "duplicate instance id " + id);
  }
  std::vector<std::size_t> order(ids_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids_[a] < ids_[b]; });
  id_rank_.assign(ids_.size(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) id_rank_[order[r]] = r;
}

InstanceTable InstanceTable::from_instances(std::span<const Instance> instances) {
  const Eigen::Index d = instances.empty() ? 0 : instances.front().features.size();
  FeatureMatrix features(static_cast<Eigen::Index>(instances.size()), d);
  std::vector<std::string> ids;
  std::vector<int> labels;
  ids.reserve(instances.size());
  labels.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    if (inst.features.size() != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "instance " + inst.id + " has " + std::to_string(inst.features.size()) +
                      " features, expected " + std::to_string(d));
    }
    features.row(static_cast<Eigen::Index>(i)) = inst.features.transpose();
    ids.push_back(inst.id);
    labels.push_back(inst.label);
  }
  return InstanceTable(std::move(ids), std::move(features), std::move(labels));
}

Instance InstanceTable::instance(InstanceIndex i) const {
  return Instance{ids_[i], features_.row(static_cast<Eigen::Index>(i)).transpose(), labels_[i]};
}

SourcePool::SourcePool(InstanceTable instances, std::vector<DataSource> sources)
    : instances_(std::move(instances)), sources_(std::move(sources)) {
  for (SourceIndex z = 0; z < sources_.size(); ++z) {
    const auto& s = sources_[z];
    if (s.id.empty()) throw Error(ErrorCode::kParseError, "source with empty id");
    if (s.instances.empty()) throw Error(ErrorCode::kParseError, "source " + s.id + " has no instances");
    for (auto i : s.instances) {
      if (i >= instances_.size()) {
        throw Error(ErrorCode::kIndexOutOfRange, "source " + s.id + " references instance " + std::to_string(i));
      }
    }
    if (!index_.emplace(s.id, z).second) throw Error(ErrorCode::kParseError, "duplicate source id " + s.id);
  }
}

SourceIndex SourcePool::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw Error(ErrorCode::kUnknownSource, std::string(id));
  return it->second;
}

std::size_t SourcePool::instance_count(Coalition coalition) const {
  std::size_t m = 0;
  for (auto z : coalition) m += sources_[z].instances.size();
  return m;
}

std::vector<InstanceIndex> SourcePool::gather_instances(Coalition coalition) const {
  std::vector<InstanceIndex> out;
  out.reserve(instance_count(coalition));
  for (auto z : coalition) out.insert(out.end(), sources_[z].instances.begin(), sources_[z].instances.end());
  return out;
}

std::vector<SourceId> SourcePool::source_ids() const {
  std::vector<SourceId> ids;
  ids.reserve(sources_.size());
  for (const auto& s : sources_) ids.push_back(s.id);
  return ids;
}

}  // namespace ads
