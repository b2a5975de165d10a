#include "ads/knn_utility.hpp"

#include "ads/error.hpp"

#include <algorithm>
#include <vector>

namespace ads {
namespace {

void check_dims(const InstanceTable& table, Eigen::Index query_dim) {
  if (table.size() > 0 && table.dim() != query_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "training dimension " + std::to_string(table.dim()) +
                                                   " vs test dimension " + std::to_string(query_dim));
  }
}

}  // namespace

double knn_vote(const InstanceTable& table, std::span<const InstanceIndex> occurrences,
                const Eigen::Ref<const Eigen::RowVectorXd>& query, int query_label, const KnnConfig& cfg) {
  if (cfg.k < 1) throw Error(ErrorCode::kInvalidTolerance, "K must be >= 1");
  check_dims(table, query.size());
  const std::size_t m = occurrences.size();
  if (m == 0) return 0.0;
  std::vector<std::pair<NeighborKey, InstanceIndex>> keyed;
  keyed.reserve(m);
  for (std::size_t p = 0; p < m; ++p) {
    const auto i = occurrences[p];
    keyed.push_back({NeighborKey{rank_distance(table.row(i), query, cfg.metric), table.id_rank()[i], p}, i});
  }
  const std::size_t kept = std::min<std::size_t>(static_cast<std::size_t>(cfg.k), m);
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(kept), keyed.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t hits = 0;
  for (std::size_t j = 0; j < kept; ++j) hits += table.label(keyed[j].second) == query_label ? 1 : 0;
  const double denom = cfg.normalization == KnnNormalization::kFixed ? static_cast<double>(cfg.k)
                                                                      : static_cast<double>(kept);
  return static_cast<double>(hits) / denom;
}

double knn_utility(const SourcePool& pool, Coalition coalition, const Instance& test, const KnnConfig& cfg) {
  const auto occurrences = pool.gather_instances(coalition);
  return knn_vote(pool.instances(), occurrences, test.features.transpose(), test.label, cfg);
}

double one_nn_utility(const SourcePool& pool, Coalition coalition, const InstanceTable& test_set) {
  if (test_set.size() == 0) return 0.0;
  const auto occurrences = pool.gather_instances(coalition);
  if (occurrences.empty()) return 0.0;
  check_dims(pool.instances(), test_set.dim());
  const auto& table = pool.instances();
  std::size_t hits = 0;
  for (std::size_t q = 0; q < test_set.size(); ++q) {
    const auto query = test_set.row(q);
    NeighborKey best{};
    InstanceIndex best_i = occurrences.front();
    for (std::size_t p = 0; p < occurrences.size(); ++p) {
      const auto i = occurrences[p];
      NeighborKey key{rank_distance(table.row(i), query, Metric::kEuclidean), table.id_rank()[i], p};
      if (p == 0 || key < best) {
        best = key;
        best_i = i;
      }
    }
    hits += table.label(best_i) == test_set.label(q) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(test_set.size());
}

KnnUtility::KnnUtility(const SourcePool& pool, const InstanceTable& test_set, KnnConfig cfg)
    : pool_(pool), test_(test_set), cfg_(cfg) {
  if (cfg_.k < 1) throw Error(ErrorCode::kInvalidTolerance, "K must be >= 1");
  check_dims(pool.instances(), test_set.dim());
}

double KnnUtility::value(Coalition coalition) const {
  if (test_.size() == 0) return 0.0;
  const auto occurrences = pool_.gather_instances(coalition);
  double total = 0.0;
  for (std::size_t q = 0; q < test_.size(); ++q) {
    total += knn_vote(pool_.instances(), occurrences, test_.row(q), test_.label(q), cfg_);
  }
  return total / static_cast<double>(test_.size());
}

std::string KnnUtility::tag() const {
  return std::string("knn(k=") + std::to_string(cfg_.k) +
         (cfg_.normalization == KnnNormalization::kFixed ? ",fixed)" : ",effective)");
}

OneNnUtility::OneNnUtility(const SourcePool& pool, const InstanceTable& test_set) : pool_(pool), test_(test_set) {
  check_dims(pool.instances(), test_set.dim());
}

}  // namespace ads
