#include "ads/monte_carlo.hpp"

#include "ads/error.hpp"
#include "ads/exact.hpp"
#include "ads/parallel.hpp"
#include "ads/permutation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace ads {
namespace {

constexpr std::uint64_t kChunk = 256;

void validate(const McConfig& cfg) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidTolerance, what); };
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) bad("epsilon must be > 0");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) bad("delta must lie in (0, 1)");
  if (!(cfg.range_bound > 0.0) || !std::isfinite(cfg.range_bound)) bad("range bound r must be > 0");
  if (cfg.max_permutations_override && *cfg.max_permutations_override == 0) bad("permutation budget must be >= 1");
}

struct Estimate {
  std::vector<double> values;
  std::uint64_t evaluations = 0;
};

/// Runs `draws` sampled permutations of `groups` with streams
/// stream_offset + s, folding marginals into `values` (indexed by source).
Estimate run_permutations(const OrderedGroups& groups, const Utility& v, std::uint64_t draws, std::uint64_t seed,
                          std::uint64_t stream_offset, std::size_t threads) {
  const std::size_t n = groups.source_count();
  Estimate est;
  est.values.assign(n, 0.0);
  std::atomic<std::uint64_t> evaluations{0};
  std::vector<double> marginals;
  for (std::uint64_t start = 0; start < draws; start += kChunk) {
    const std::uint64_t count = std::min(kChunk, draws - start);
    marginals.assign(count * n, 0.0);
    parallel_for(count, threads, [&](std::size_t j) {
      const auto order = sample_ordered_permutation(groups, seed, stream_offset + start + j);
      std::vector<SourceIndex> prefix;
      prefix.reserve(n);
      double previous = v.value(prefix);
      for (auto z : order) {
        prefix.insert(std::lower_bound(prefix.begin(), prefix.end(), z), z);
        const double current = v.value(prefix);
        marginals[j * n + z] = current - previous;
        previous = current;
      }
      evaluations.fetch_add(order.size() + 1, std::memory_order_relaxed);
    });
    for (std::uint64_t j = 0; j < count; ++j) {
      const double s = static_cast<double>(start + j + 1);
      for (std::size_t z = 0; z < n; ++z) {
        est.values[z] = (s - 1.0) / s * est.values[z] + marginals[j * n + z] / s;
      }
    }
  }
  est.evaluations = evaluations.load();
  return est;
}

void stamp(ValuationReport& report, const McConfig& cfg, std::uint64_t samples, const std::string& utility) {
  report.metadata.utility = utility;
  report.metadata.seed = cfg.seed;
  report.metadata.samples = samples;
  report.metadata.epsilon = cfg.epsilon;
  report.metadata.delta = cfg.delta;
  report.metadata.range_bound = cfg.range_bound;
  report.metadata.guarantee_void = cfg.max_permutations_override.has_value();
}

}  // namespace

std::uint64_t required_sample_size(const McConfig& cfg, std::size_t n) {
  validate(cfg);
  if (n < 1) throw Error(ErrorCode::kInvalidTolerance, "source count must be >= 1");
  const double m = cfg.range_bound * cfg.range_bound / (2.0 * cfg.epsilon * cfg.epsilon) *
                   std::log(2.0 * static_cast<double>(n) / cfg.delta);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(m)));
}

ValuationReport mc_ads(const OrderedGroups& groups, const Utility& v, const McConfig& cfg) {
  const auto m_star = required_sample_size(cfg, groups.source_count());
  const auto draws = cfg.max_permutations_override.value_or(m_star);
  auto est = run_permutations(groups, v, draws, cfg.seed, 0, cfg.threads);
  auto report = make_report("mc", std::move(est.values));
  stamp(report, cfg, draws, v.tag());
  report.metadata.utility_evaluations = est.evaluations;
  report.group_residuals = verify_group_efficiency(report, groups, v);
  report.efficiency_residual = verify_efficiency(report, v);
  return report;
}

ValuationReport mc_within_round(const OrderedGroups& rounds, const StatefulUtility& v, const McConfig& cfg) {
  const auto m_star = required_sample_size(cfg, rounds.source_count());
  const auto draws = cfg.max_permutations_override.value_or(m_star);
  const auto states = realized_trajectory(rounds, v);
  std::vector<double> values(rounds.source_count(), 0.0);
  std::vector<double> residuals;
  std::uint64_t evaluations = 0;
  for (std::size_t t = 0; t < rounds.group_count(); ++t) {
    const auto& group = rounds.group(t);
    // Relabel the round's sources to 0..k-1 so the round is a single-group game.
    const OrderedGroups local = OrderedGroups::single_group(group.size());
    AnchoredUtility anchored(v, states[t]);
    FunctionUtility relabeled(
        [&](Coalition c) {
          std::vector<SourceIndex> mapped;
          mapped.reserve(c.size());
          for (auto j : c) mapped.push_back(group[j]);
          std::sort(mapped.begin(), mapped.end());
          return anchored.value(mapped);
        },
        v.range_bound(), v.tag());
    auto est = run_permutations(local, relabeled, draws, cfg.seed, static_cast<std::uint64_t>(t) << 40, cfg.threads);
    double total = 0.0;
    for (std::size_t j = 0; j < group.size(); ++j) {
      values[group[j]] = est.values[j];
      total += est.values[j];
    }
    residuals.push_back(std::abs(total - (v.score(states[t + 1]) - v.score(states[t]))));
    evaluations += est.evaluations;
  }
  auto report = make_report("mc-within-round", std::move(values));
  stamp(report, cfg, draws, v.tag());
  report.metadata.utility_evaluations = evaluations;
  report.group_residuals = std::move(residuals);
  return report;
}

}  // namespace ads
