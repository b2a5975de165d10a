#pragma once

#include "ads/groups.hpp"
#include "ads/permutation.hpp"
#include "ads/report.hpp"
#include "ads/stateful.hpp"
#include "ads/utility.hpp"

#include <cstdint>
#include <vector>

namespace ads {

/// Mean one-step marginal over every ordered permutation of R^sigma(D).
/// Records per-group efficiency residuals. Throws EnumerationTooLarge.
ValuationReport exact_ads_permutation(const OrderedGroups& groups, const Utility& v,
                                      std::uint64_t cap = kDefaultEnumerationCap);

/// Within-group subset form: for z in D_t,
///   (1/|D_t|) sum_{S in D_t \ z} C(|D_t|-1, |S|)^-1 [v(U_{t-1} u S u z) - v(U_{t-1} u S)].
/// Throws EnumerationTooLarge when 2^{|D_t|-1} exceeds cap.
ValuationReport exact_ads_subset(const OrderedGroups& groups, const Utility& v,
                                 std::uint64_t cap = kDefaultEnumerationCap);

/// Classical Data Shapley over n sources (the single-group subset form).
ValuationReport exact_ds(std::size_t source_count, const Utility& v, std::uint64_t cap = kDefaultEnumerationCap);

/// Sequential ADS along the realized trajectory: each round is valued by the
/// subset form at the state reached after all earlier rounds, then the state
/// absorbs the whole round. Group residuals compare each round's total with
/// score(A_t) - score(A_{t-1}).
ValuationReport within_round_values(const OrderedGroups& rounds, const StatefulUtility& v,
                                    std::uint64_t cap = kDefaultEnumerationCap);

/// Within-round leave-one-out: v(D_t; A_{t-1}) - v(D_t \ z; A_{t-1}).
ValuationReport within_round_loo(const OrderedGroups& rounds, const StatefulUtility& v);

/// Realized states A_0 = init, A_t = update(A_{t-1}, D_t) for t = 1..T.
std::vector<ModelState> realized_trajectory(const OrderedGroups& rounds, const StatefulUtility& v);

/// residual_t = |sum_{z in D_t} phi(z) - (v(U_t) - v(U_{t-1}))| for each group.
std::vector<double> verify_group_efficiency(const ValuationReport& report, const OrderedGroups& groups,
                                            const Utility& v);

/// |sum_z phi(z) - (v(D) - v(empty))|.
double verify_efficiency(const ValuationReport& report, const Utility& v);

inline constexpr double kExactResidualTolerance = 1e-10;

}  // namespace ads
