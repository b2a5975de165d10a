#pragma once

#include "ads/dataset.hpp"
#include "ads/utility.hpp"

#include <Eigen/Core>

#include <span>
#include <tuple>

namespace ads {

enum class Metric { kEuclidean, kManhattan };

/// How the neighbor vote is normalized.
///  kEffective: divide by K' = min(K, m(S)), the fraction of the K' nearest.
///  kFixed:     divide by K; a missing K-th neighbor counts as a non-match.
///              This is the game the KNN-ADS recurrence values exactly.
enum class KnnNormalization { kEffective, kFixed };

enum class TieRule { kDistanceThenId };

struct KnnConfig {
  int k = 5;
  Metric metric = Metric::kEuclidean;
  TieRule tie_rule = TieRule::kDistanceThenId;
  KnnNormalization normalization = KnnNormalization::kEffective;
};

/// Monotone distance used for ranking (squared L2 or L1).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar rank_distance(const Eigen::MatrixBase<DerivedA>& a,
                                        const Eigen::MatrixBase<DerivedB>& b, Metric metric) {
  switch (metric) {
    case Metric::kManhattan: return (a - b).template lpNorm<1>();
    case Metric::kEuclidean: break;
  }
  return (a - b).squaredNorm();
}

/// Total order on training occurrences relative to one test point:
/// (distance, instance-id rank, occurrence position).
struct NeighborKey {
  double distance = 0.0;
  std::size_t id_rank = 0;
  std::size_t occurrence = 0;

  friend bool operator<(const NeighborKey& a, const NeighborKey& b) {
    return std::tie(a.distance, a.id_rank, a.occurrence) < std::tie(b.distance, b.id_rank, b.occurrence);
  }
};

/// Fraction of the nearest neighbors voting for the query label over an explicit multiset of instance occurrences.
double knn_vote(const InstanceTable& table, std::span<const InstanceIndex> occurrences,
                const Eigen::Ref<const Eigen::RowVectorXd>& query, int query_label, const KnnConfig& cfg);

/// KNN utility of S at one test instance, in [0, 1]; 0 for the empty set.
double knn_utility(const SourcePool& pool, Coalition coalition, const Instance& test, const KnnConfig& cfg);

/// Mean 1-NN accuracy of Ins(S) over a test set; 0 for the empty set.
double one_nn_utility(const SourcePool& pool, Coalition coalition, const InstanceTable& test_set);

/// KNN utility averaged over a test set.
class KnnUtility final : public Utility {
 public:
  KnnUtility(const SourcePool& pool, const InstanceTable& test_set, KnnConfig cfg);
  double value(Coalition coalition) const override;
  std::string tag() const override;
  const KnnConfig& config() const noexcept { return cfg_; }

 private:
  const SourcePool& pool_;
  const InstanceTable& test_;
  KnnConfig cfg_;
};

class OneNnUtility final : public Utility {
 public:
  OneNnUtility(const SourcePool& pool, const InstanceTable& test_set);
  double value(Coalition coalition) const override { return one_nn_utility(pool_, coalition, test_); }
  std::string tag() const override { return "one-nn"; }

 private:
  const SourcePool& pool_;
  const InstanceTable& test_;
};

}  // namespace ads
