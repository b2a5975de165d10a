#pragma once

#include "ads/dataset.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ads {

struct ReportMetadata {
  std::string utility;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;  // m* (or the override) for MC
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> range_bound;
  std::optional<int> k;
  bool guarantee_void = false;  // MC run with a permutation budget override
  std::optional<std::uint64_t> utility_evaluations;
  std::optional<double> wall_clock_seconds;

  friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

/// Per-source values with method metadata and recorded efficiency checks.
struct ValuationReport {
  std::string method;
  std::vector<SourceId> source_ids;
  std::vector<double> values;  // aligned with source_ids
  std::map<ContributorId, double> contributor_values;
  ReportMetadata metadata;
  std::vector<double> group_residuals;
  std::optional<double> efficiency_residual;

  double value_of(const SourceId& id) const;
  double total() const;

  friend bool operator==(const ValuationReport&, const ValuationReport&) = default;
};

/// Report skeleton with ids "0", "1", ... for n sources.
ValuationReport make_report(std::string method, std::vector<double> values);

/// Replaces index ids by the pool's source ids and fills contributor values.
ValuationReport attach_pool(ValuationReport report, const SourcePool& pool);

/// Sums source values per contributor. Every source must be owned
/// (UnownedSource otherwise); listed contributors without sources get 0.
ValuationReport aggregate_contributors(ValuationReport report,
                                       const std::map<SourceId, ContributorId>& ownership,
                                       const std::vector<ContributorId>& contributors = {});

std::map<SourceId, ContributorId> ownership_of(const SourcePool& pool);

}  // namespace ads
