#pragma once

#include "ads/dataset.hpp"
#include "ads/utility.hpp"

#include <string>
#include <vector>

namespace ads {

/// Per-class tally of absorbed instances: counts and running feature means.
/// Label-only learners keep zero feature columns.
struct ModelState {
  std::vector<int> classes;  // sorted
  Eigen::VectorXd counts;
  FeatureMatrix means;

  bool empty() const { return classes.empty(); }
  double count_of(int label) const;
  friend bool operator==(const ModelState& a, const ModelState& b);
};

/// Learner whose utility is read off a model state reached by incremental
/// updates: v(S; A) = score(update(A, S)). update never mutates its input.
class StatefulUtility {
 public:
  virtual ~StatefulUtility() = default;
  virtual ModelState initial_state() const = 0;
  virtual ModelState update(const ModelState& state, Coalition coalition) const = 0;
  virtual double score(const ModelState& state) const = 0;
  virtual double range_bound() const { return 1.0; }
  virtual std::string tag() const = 0;

  double value(Coalition coalition, const ModelState& state) const { return score(update(state, coalition)); }
};

/// Folds the instances of a coalition into a tally state. With
/// track_features=false only label counts are kept.
ModelState fold_instances(const ModelState& state, const SourcePool& pool, Coalition coalition,
                          bool track_features);

/// 1{(vote total of state) + (vote total of S) > 0} over labels in {-1, +1}.
double sign_vote_utility(const ModelState& state, const SourcePool& pool, Coalition coalition);

class SignVoteUtility final : public StatefulUtility {
 public:
  explicit SignVoteUtility(const SourcePool& pool);
  ModelState initial_state() const override { return {}; }
  ModelState update(const ModelState& state, Coalition coalition) const override {
    return fold_instances(state, pool_, coalition, false);
  }
  double score(const ModelState& state) const override;
  std::string tag() const override { return "sign-vote"; }

 private:
  const SourcePool& pool_;
};

/// Nearest-class-mean classifier scored by accuracy on a fixed test set.
class PrototypeUtility final : public StatefulUtility {
 public:
  PrototypeUtility(const SourcePool& pool, const InstanceTable& test_set);
  ModelState initial_state() const override;
  ModelState update(const ModelState& state, Coalition coalition) const override {
    return fold_instances(state, pool_, coalition, true);
  }
  double score(const ModelState& state) const override;
  std::string tag() const override { return "prototype"; }

  /// Predicted label for a feature row; requires a non-empty state.
  int predict(const ModelState& state, const Eigen::Ref<const Eigen::RowVectorXd>& x) const;

 private:
  const SourcePool& pool_;
  const InstanceTable& test_;
};

PrototypeUtility prototype_utility(const SourcePool& pool, const InstanceTable& test_set);

/// Stateless view v(S) := v(S; anchor) of a stateful learner.
class AnchoredUtility final : public Utility {
 public:
  AnchoredUtility(const StatefulUtility& learner, ModelState anchor)
      : learner_(learner), anchor_(std::move(anchor)) {}
  double value(Coalition coalition) const override { return learner_.value(coalition, anchor_); }
  double range_bound() const override { return learner_.range_bound(); }
  std::string tag() const override { return learner_.tag(); }

 private:
  const StatefulUtility& learner_;
  ModelState anchor_;
};

/// Delta_A(z | S) = v(S u {z}; A) - v(S; A). Throws SourceInSubset.
double state_marginal_contribution(const StatefulUtility& v, const ModelState& state, SourceIndex z,
                                   Coalition subset);

}  // namespace ads
