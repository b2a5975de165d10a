#pragma once

#include "ads/dataset.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace ads {

/// Set function v : 2^D -> R over source indices. Implementations must be
/// pure and safe to call concurrently.
class Utility {
 public:
  virtual ~Utility() = default;

  /// coalition is sorted ascending and duplicate-free.
  virtual double value(Coalition coalition) const = 0;

  /// Width r of an interval containing every one-step marginal contribution.
  virtual double range_bound() const { return 1.0; }

  virtual std::string tag() const = 0;

  double empty_value() const { return value({}); }
};

class FunctionUtility final : public Utility {
 public:
  FunctionUtility(std::function<double(Coalition)> fn, double range_bound, std::string tag)
      : fn_(std::move(fn)), range_(range_bound), tag_(std::move(tag)) {}
  double value(Coalition coalition) const override { return fn_(coalition); }
  double range_bound() const override { return range_; }
  std::string tag() const override { return tag_; }

 private:
  std::function<double(Coalition)> fn_;
  double range_;
  std::string tag_;
};

/// Explicit game on n <= 30 players: one value per subset bitmask.
class TableUtility final : public Utility {
 public:
  TableUtility(std::size_t players, std::vector<double> table, double range_bound = 1.0);
  double value(Coalition coalition) const override;
  double range_bound() const override { return range_; }
  std::string tag() const override { return "table"; }
  std::size_t players() const noexcept { return players_; }
  double at(std::uint32_t mask) const { return table_[mask]; }

 private:
  std::size_t players_;
  std::vector<double> table_;
  double range_;
};

/// v(S) = m(S), the instance count.
class AdditiveUtility final : public Utility {
 public:
  explicit AdditiveUtility(const SourcePool& pool) : pool_(pool) {}
  double value(Coalition coalition) const override { return static_cast<double>(pool_.instance_count(coalition)); }
  double range_bound() const override;
  std::string tag() const override { return "additive"; }

 private:
  const SourcePool& pool_;
};

/// Positive affine image alpha*v + beta of another utility.
class AffineUtility final : public Utility {
 public:
  AffineUtility(const Utility& base, double alpha, double beta) : base_(base), alpha_(alpha), beta_(beta) {}
  double value(Coalition coalition) const override { return alpha_ * base_.value(coalition) + beta_; }
  double range_bound() const override { return std::abs(alpha_) * base_.range_bound(); }
  std::string tag() const override { return "affine(" + base_.tag() + ")"; }

 private:
  const Utility& base_;
  double alpha_;
  double beta_;
};

/// Memoizes another utility keyed by the canonical sorted coalition. The cache
/// is cleared when it reaches capacity.
class CachedUtility final : public Utility {
 public:
  explicit CachedUtility(const Utility& base, std::size_t capacity = 1u << 20)
      : base_(base), capacity_(capacity) {}
  double value(Coalition coalition) const override;
  double range_bound() const override { return base_.range_bound(); }
  std::string tag() const override { return base_.tag(); }
  std::size_t misses() const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<SourceIndex>& key) const noexcept;
  };
  const Utility& base_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::vector<SourceIndex>, double, KeyHash> cache_;
  mutable std::size_t misses_ = 0;
};

/// Delta(z | S) = v(S u {z}) - v(S). Throws SourceInSubset if z is in S.
double marginal_contribution(const Utility& v, SourceIndex z, Coalition subset);

/// Sorted union of a sorted coalition with one extra source.
std::vector<SourceIndex> with_source(Coalition coalition, SourceIndex z);

}  // namespace ads
