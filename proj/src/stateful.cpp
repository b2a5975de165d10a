#include "ads/stateful.hpp"

#include "ads/error.hpp"
#include "ads/knn_utility.hpp"

#include <algorithm>

namespace ads {

double ModelState::count_of(int label) const {
  auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) return 0.0;
  return counts[it - classes.begin()];
}

bool operator==(const ModelState& a, const ModelState& b) {
  return a.classes == b.classes && a.counts.size() == b.counts.size() && a.counts == b.counts &&
         a.means.rows() == b.means.rows() && a.means.cols() == b.means.cols() && a.means == b.means;
}

ModelState fold_instances(const ModelState& state, const SourcePool& pool, Coalition coalition,
                          bool track_features) {
  const auto& table = pool.instances();
  const Eigen::Index d = track_features ? table.dim() : 0;
  if (track_features && !state.empty() && state.means.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "state has " + std::to_string(state.means.cols()) +
                                                   " features, data has " + std::to_string(d));
  }
  const auto occurrences = pool.gather_instances(coalition);
  if (occurrences.empty()) return state;

  std::vector<int> classes = state.classes;
  for (auto i : occurrences) classes.push_back(table.label(i));
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  const auto C = static_cast<Eigen::Index>(classes.size());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(C);
  FeatureMatrix sums = FeatureMatrix::Zero(C, d);
  auto slot = [&](int label) { return std::lower_bound(classes.begin(), classes.end(), label) - classes.begin(); };
  for (std::size_t c = 0; c < state.classes.size(); ++c) {
    const auto k = slot(state.classes[c]);
    counts[k] = state.counts[static_cast<Eigen::Index>(c)];
    if (d > 0) sums.row(k) = state.means.row(static_cast<Eigen::Index>(c)) * counts[k];
  }
  for (auto i : occurrences) {
    const auto k = slot(table.label(i));
    counts[k] += 1.0;
    if (d > 0) sums.row(k) += table.row(i);
  }
  ModelState out;
  out.classes = std::move(classes);
  out.means = FeatureMatrix::Zero(C, d);
  for (Eigen::Index k = 0; k < C; ++k) {
    if (d > 0 && counts[k] > 0) out.means.row(k) = sums.row(k) / counts[k];
  }
  out.counts = std::move(counts);
  return out;
}

namespace {

void require_sign_labels(const SourcePool& pool, Coalition coalition) {
  for (auto i : pool.gather_instances(coalition)) {
    const int y = pool.instances().label(i);
    if (y != 1 && y != -1) {
      throw Error(ErrorCode::kInvalidLabel, "instance " + pool.instances().ids()[i] + " has label " +
                                                std::to_string(y) + ", expected -1 or +1");
    }
  }
}

double vote_total(const ModelState& state) { return state.count_of(1) - state.count_of(-1); }

}  // namespace

double sign_vote_utility(const ModelState& state, const SourcePool& pool, Coalition coalition) {
  require_sign_labels(pool, coalition);
  double total = vote_total(state);
  for (auto i : pool.gather_instances(coalition)) total += pool.instances().label(i);
  return total > 0 ? 1.0 : 0.0;
}

SignVoteUtility::SignVoteUtility(const SourcePool& pool) : pool_(pool) {
  std::vector<SourceIndex> all(pool.size());
  for (SourceIndex z = 0; z < pool.size(); ++z) all[z] = z;
  require_sign_labels(pool, all);
}

double SignVoteUtility::score(const ModelState& state) const { return vote_total(state) > 0 ? 1.0 : 0.0; }

PrototypeUtility::PrototypeUtility(const SourcePool& pool, const InstanceTable& test_set)
    : pool_(pool), test_(test_set) {
  if (pool.instances().size() > 0 && test_set.size() > 0 && pool.instances().dim() != test_set.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "training dimension " + std::to_string(pool.instances().dim()) +
                                                   " vs test dimension " + std::to_string(test_set.dim()));
  }
}

ModelState PrototypeUtility::initial_state() const {
  ModelState s;
  s.means = FeatureMatrix::Zero(0, pool_.instances().dim());
  return s;
}

int PrototypeUtility::predict(const ModelState& state, const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  int best_label = state.classes.front();
  double best = 0.0;
  bool found = false;
  for (std::size_t c = 0; c < state.classes.size(); ++c) {
    const auto k = static_cast<Eigen::Index>(c);
    if (state.counts[k] <= 0) continue;
    const double dist = rank_distance(state.means.row(k), x, Metric::kEuclidean);
    if (!found || dist < best) {
      best = dist;
      best_label = state.classes[c];
      found = true;
    }
  }
  return best_label;
}

double PrototypeUtility::score(const ModelState& state) const {
  if (state.empty() || test_.size() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t q = 0; q < test_.size(); ++q) hits += predict(state, test_.row(q)) == test_.label(q) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(test_.size());
}

PrototypeUtility prototype_utility(const SourcePool& pool, const InstanceTable& test_set) {
  return PrototypeUtility(pool, test_set);
}

double state_marginal_contribution(const StatefulUtility& v, const ModelState& state, SourceIndex z,
                                   Coalition subset) {
  if (std::binary_search(subset.begin(), subset.end(), z)) {
    throw Error(ErrorCode::kSourceInSubset, "source index " + std::to_string(z));
  }
  const auto joined = with_source(subset, z);
  return v.value(joined, state) - v.value(subset, state);
}

}  // namespace ads
