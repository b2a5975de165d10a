#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ads {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using FeatureMatrix = RowMatrix<double>;
using FeatureVector = Eigen::VectorXd;

using SourceId = std::string;
using ContributorId = std::string;
using SourceIndex = std::size_t;
using InstanceIndex = std::size_t;

/// Sorted, duplicate-free list of source indices.
using Coalition = std::span<const SourceIndex>;

struct Instance {
  std::string id;
  FeatureVector features;
  int label = 0;
};

/// Column store of labeled instances: one feature row per instance.
class InstanceTable {
 public:
  InstanceTable() = default;
  InstanceTable(std::vector<std::string> ids, FeatureMatrix features, std::vector<int> labels);

  static InstanceTable from_instances(std::span<const Instance> instances);

  std::size_t size() const noexcept { return ids_.size(); }
  Eigen::Index dim() const noexcept { return features_.cols(); }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const FeatureMatrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int label(InstanceIndex i) const { return labels_[i]; }
  auto row(InstanceIndex i) const { return features_.row(static_cast<Eigen::Index>(i)); }

  /// Position of each instance id in lexicographic id order; the deterministic
  /// tie-break for equal distances.
  const std::vector<std::size_t>& id_rank() const noexcept { return id_rank_; }

  Instance instance(InstanceIndex i) const;

 private:
  std::vector<std::string> ids_;
  FeatureMatrix features_;
  std::vector<int> labels_;
  std::vector<std::size_t> id_rank_;
};

struct DataSource {
  SourceId id;
  ContributorId contributor;
  std::vector<InstanceIndex> instances;  // multiset; repeats allowed
};

/// The full valuation ground set: instances plus the sources that own them.
class SourcePool {
 public:
  SourcePool() = default;
  SourcePool(InstanceTable instances, std::vector<DataSource> sources);

  std::size_t size() const noexcept { return sources_.size(); }
  const InstanceTable& instances() const noexcept { return instances_; }
  const std::vector<DataSource>& sources() const noexcept { return sources_; }
  const DataSource& source(SourceIndex z) const { return sources_[z]; }

  SourceIndex index_of(std::string_view id) const;
  bool contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }

  /// m(S) for a coalition.
  std::size_t instance_count(Coalition coalition) const;

  /// Ins(S) as (instance index) occurrences, in coalition order.
  std::vector<InstanceIndex> gather_instances(Coalition coalition) const;

  std::vector<SourceId> source_ids() const;

 private:
  InstanceTable instances_;
  std::vector<DataSource> sources_;
  std::unordered_map<std::string, SourceIndex> index_;
};

}  // namespace ads
