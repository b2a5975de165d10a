#pragma once

#include "ads/groups.hpp"
#include "ads/report.hpp"
#include "ads/stateful.hpp"
#include "ads/utility.hpp"

#include <cstdint>
#include <optional>

namespace ads {

struct McConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  double range_bound = 1.0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> max_permutations_override;
  std::size_t threads = 1;
};

/// m* = ceil(r^2 / (2 eps^2) * ln(2n / delta)), natural log.
/// Throws InvalidTolerance outside eps > 0, 0 < delta < 1, r > 0, n >= 1.
std::uint64_t required_sample_size(const McConfig& cfg, std::size_t n);

/// Monte Carlo ADS: m* ordered permutations, one left-to-right pass each,
/// folded with the streaming running-mean update. Results do not depend on
/// cfg.threads: draw s uses the stream (seed, s) and the fold runs in draw order.
ValuationReport mc_ads(const OrderedGroups& groups, const Utility& v, const McConfig& cfg);

/// Monte Carlo estimate of the within-round values: permutations of each round
/// evaluated at that round's realized starting state.
ValuationReport mc_within_round(const OrderedGroups& rounds, const StatefulUtility& v, const McConfig& cfg);

}  // namespace ads
