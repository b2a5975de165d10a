#pragma once

#include "ads/dataset.hpp"
#include "ads/groups.hpp"

#include <random>
#include <string>
#include <vector>

namespace fixture {

/// Pool in which instance i is the only member of source "s<i>".
inline ads::SourcePool singleton_pool(const ads::FeatureMatrix& x, const std::vector<int>& y,
                                      const std::string& prefix = "q") {
  std::vector<std::string> ids;
  std::vector<ads::DataSource> sources;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%03ld", prefix.c_str(), static_cast<long>(i));
    ids.emplace_back(buf);
    sources.push_back({"s" + std::string(buf + prefix.size()), "c0", {static_cast<std::size_t>(i)}});
  }
  return ads::SourcePool(ads::InstanceTable(ids, x, y), sources);
}

inline ads::InstanceTable table_of(const ads::FeatureMatrix& x, const std::vector<int>& y,
                                   const std::string& prefix = "t") {
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < x.rows(); ++i) ids.push_back(prefix + std::to_string(i));
  return ads::InstanceTable(ids, x, y);
}

/// A random small KNN configuration: integer coordinates on a tiny grid so
/// that equal distances occur, binary labels, groups of at most 6 instances.
struct KnnCase {
  ads::SourcePool pool;
  ads::OrderedGroups groups;
  ads::InstanceTable test;
  std::vector<std::size_t> group_of;
  int k;
};

inline KnnCase random_knn_case(std::mt19937_64& rng, std::size_t max_groups = 3, std::size_t max_group = 6) {
  const std::size_t T = 1 + rng() % max_groups;
  std::vector<std::size_t> group_of;
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t size = 1 + rng() % max_group;
    group_of.insert(group_of.end(), size, t);
  }
  const auto n = static_cast<Eigen::Index>(group_of.size());
  ads::FeatureMatrix x(n, 2);
  std::vector<int> y(group_of.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(rng() % 5);
    x(i, 1) = static_cast<double>(rng() % 3);
    y[static_cast<std::size_t>(i)] = static_cast<int>(rng() % 2);
  }
  ads::FeatureMatrix q(1, 2);
  q << static_cast<double>(rng() % 5), static_cast<double>(rng() % 3);
  std::vector<std::vector<ads::SourceIndex>> groups(T);
  for (std::size_t z = 0; z < group_of.size(); ++z) groups[group_of[z]].push_back(z);
  // Shuffled ids decouple the tie-break order from the group order.
  std::vector<std::size_t> perm(group_of.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::string> ids;
  std::vector<ads::DataSource> sources;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    ids.push_back("i" + std::to_string(10 + perm[i]));
    sources.push_back({"s" + std::to_string(i), "c" + std::to_string(group_of[i]), {i}});
  }
  ads::SourcePool pool(ads::InstanceTable(ids, x, y), sources);
  return {std::move(pool), ads::OrderedGroups::from_indices(groups, group_of.size()),
          ads::InstanceTable({"test"}, q, {static_cast<int>(rng() % 2)}), group_of,
          1 + static_cast<int>(rng() % 3)};
}

}  // namespace fixture
