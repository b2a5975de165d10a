#include "ads/exact.hpp"

#include "ads/error.hpp"
#include "ads/summation.hpp"

#include <algorithm>
#include <cmath>

namespace ads {
namespace {

std::vector<SourceIndex> sorted_union(std::vector<SourceIndex> a, const std::vector<SourceIndex>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

std::vector<SourceIndex> all_sources(std::size_t n) {
  std::vector<SourceIndex> all(n);
  for (std::size_t z = 0; z < n; ++z) all[z] = z;
  return all;
}

void check_subset_cap(const OrderedGroups& groups, std::uint64_t cap) {
  for (std::size_t t = 0; t < groups.group_count(); ++t) {
    const auto size = groups.group(t).size();
    if (size - 1 >= 63 || (std::uint64_t{1} << (size - 1)) > cap) {
      throw Error(ErrorCode::kEnumerationTooLarge, "group " + std::to_string(t + 1) + " has " +
                                                       std::to_string(size) + " sources; 2^(n-1) exceeds cap " +
                                                       std::to_string(cap));
    }
  }
}

/// C(n, k) as a double; exact for the sizes allowed by the enumeration caps.
double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (std::size_t j = 1; j <= k; ++j) out = out * static_cast<double>(n - k + j) / static_cast<double>(j);
  return std::round(out);
}

/// Subset-form value of each member of one group, with marginals supplied by
/// gain(S_t, z) for S_t a sorted subset of the group without z.
template <typename Gain>
void value_group(const std::vector<SourceIndex>& group, std::vector<double>& out, Gain&& gain) {
  const std::size_t n = group.size();
  std::vector<SourceIndex> others;
  std::vector<SourceIndex> subset;
  for (std::size_t a = 0; a < n; ++a) {
    others.clear();
    for (std::size_t b = 0; b < n; ++b) {
      if (b != a) others.push_back(group[b]);
    }
    CompensatedSum sum;
    const std::uint64_t masks = std::uint64_t{1} << others.size();
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
      subset.clear();
      for (std::size_t b = 0; b < others.size(); ++b) {
        if (mask & (std::uint64_t{1} << b)) subset.push_back(others[b]);
      }
      const double weight = 1.0 / (static_cast<double>(n) * binomial(n - 1, subset.size()));
      sum.add(weight * gain(subset, group[a]));
    }
    out[group[a]] = sum.value();
  }
}

}  // namespace

ValuationReport exact_ads_permutation(const OrderedGroups& groups, const Utility& v, std::uint64_t cap) {
  const std::size_t n = groups.source_count();
  CachedUtility cached(v);
  std::vector<CompensatedSum> sums(n);
  std::uint64_t count = 0;
  const double empty = cached.value({});
  std::vector<SourceIndex> prefix;
  for_each_ordered_permutation(
      groups,
      [&](const OrderedPermutation& order) {
        prefix.clear();
        double previous = empty;
        for (auto z : order) {
          prefix.insert(std::lower_bound(prefix.begin(), prefix.end(), z), z);
          const double current = cached.value(prefix);
          sums[z].add(current - previous);
          previous = current;
        }
        ++count;
      },
      cap);
  std::vector<double> values(n);
  for (std::size_t z = 0; z < n; ++z) values[z] = sums[z].value() / static_cast<double>(count);
  auto report = make_report("exact-perm", std::move(values));
  report.metadata.utility = v.tag();
  report.metadata.samples = count;
  report.group_residuals = verify_group_efficiency(report, groups, cached);
  report.efficiency_residual = verify_efficiency(report, cached);
  return report;
}

ValuationReport exact_ads_subset(const OrderedGroups& groups, const Utility& v, std::uint64_t cap) {
  check_subset_cap(groups, cap);
  const std::size_t n = groups.source_count();
  CachedUtility cached(v);
  std::vector<double> values(n, 0.0);
  std::vector<SourceIndex> prefix;
  for (std::size_t t = 0; t < groups.group_count(); ++t) {
    value_group(groups.group(t), values, [&](const std::vector<SourceIndex>& subset, SourceIndex z) {
      const auto base = sorted_union(prefix, subset);
      return marginal_contribution(cached, z, base);
    });
    prefix = sorted_union(prefix, groups.group(t));
  }
  auto report = make_report("exact-subset", std::move(values));
  report.metadata.utility = v.tag();
  report.group_residuals = verify_group_efficiency(report, groups, cached);
  report.efficiency_residual = verify_efficiency(report, cached);
  return report;
}

ValuationReport exact_ds(std::size_t source_count, const Utility& v, std::uint64_t cap) {
  auto report = exact_ads_subset(OrderedGroups::single_group(source_count), v, cap);
  report.method = "ds";
  return report;
}

std::vector<ModelState> realized_trajectory(const OrderedGroups& rounds, const StatefulUtility& v) {
  std::vector<ModelState> states{v.initial_state()};
  for (std::size_t t = 0; t < rounds.group_count(); ++t) states.push_back(v.update(states.back(), rounds.group(t)));
  return states;
}

ValuationReport within_round_values(const OrderedGroups& rounds, const StatefulUtility& v, std::uint64_t cap) {
  check_subset_cap(rounds, cap);
  const auto states = realized_trajectory(rounds, v);
  std::vector<double> values(rounds.source_count(), 0.0);
  std::vector<double> residuals;
  for (std::size_t t = 0; t < rounds.group_count(); ++t) {
    AnchoredUtility anchored(v, states[t]);
    CachedUtility cached(anchored);
    value_group(rounds.group(t), values, [&](const std::vector<SourceIndex>& subset, SourceIndex z) {
      return marginal_contribution(cached, z, subset);
    });
    CompensatedSum total;
    for (auto z : rounds.group(t)) total.add(values[z]);
    residuals.push_back(std::abs(total.value() - (v.score(states[t + 1]) - v.score(states[t]))));
  }
  auto report = make_report("within-round", std::move(values));
  report.metadata.utility = v.tag();
  report.group_residuals = residuals;
  CompensatedSum total;
  for (double x : report.values) total.add(x);
  report.efficiency_residual = std::abs(total.value() - (v.score(states.back()) - v.score(states.front())));
  return report;
}

ValuationReport within_round_loo(const OrderedGroups& rounds, const StatefulUtility& v) {
  const auto states = realized_trajectory(rounds, v);
  std::vector<double> values(rounds.source_count(), 0.0);
  for (std::size_t t = 0; t < rounds.group_count(); ++t) {
    const auto& group = rounds.group(t);
    const double full = v.score(states[t + 1]);
    std::vector<SourceIndex> rest;
    for (auto z : group) {
      rest.clear();
      for (auto w : group) {
        if (w != z) rest.push_back(w);
      }
      values[z] = full - v.value(rest, states[t]);
    }
  }
  auto report = make_report("within-round-loo", std::move(values));
  report.metadata.utility = v.tag();
  return report;
}

std::vector<double> verify_group_efficiency(const ValuationReport& report, const OrderedGroups& groups,
                                            const Utility& v) {
  if (report.values.size() != groups.source_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "report and groups disagree on the source count");
  }
  std::vector<double> residuals;
  std::vector<SourceIndex> prefix;
  double previous = v.value(prefix);
  for (std::size_t t = 0; t < groups.group_count(); ++t) {
    CompensatedSum total;
    for (auto z : groups.group(t)) total.add(report.values[z]);
    prefix = sorted_union(prefix, groups.group(t));
    const double current = v.value(prefix);
    residuals.push_back(std::abs(total.value() - (current - previous)));
    previous = current;
  }
  return residuals;
}

double verify_efficiency(const ValuationReport& report, const Utility& v) {
  const auto everything = all_sources(report.values.size());
  return std::abs(report.total() - (v.value(everything) - v.value({})));
}

}  // namespace ads
