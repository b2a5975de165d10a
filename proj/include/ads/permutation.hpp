#pragma once

#include "ads/groups.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace ads {

using OrderedPermutation = std::vector<SourceIndex>;

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Counter-based generator: the stream for (seed, stream) does not depend on
/// any other stream, so draw k of a run can be reproduced in isolation.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform integer in [0, bound), bound > 0, unbiased.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1).
  double uniform();

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);

/// Uniform draw from R^sigma(D): an independent Fisher-Yates shuffle of every
/// group, concatenated in group order. Deterministic in (seed, draw_index).
OrderedPermutation sample_ordered_permutation(const OrderedGroups& groups, std::uint64_t seed,
                                              std::uint64_t draw_index = 0);

/// True iff group indices are non-decreasing and every source appears once.
bool respects_groups(const OrderedGroups& groups, const OrderedPermutation& order);

/// Visits all prod_t |D_t|! ordered permutations in lexicographic order of the
/// within-group arrangements. Throws EnumerationTooLarge above cap.
void for_each_ordered_permutation(const OrderedGroups& groups,
                                  const std::function<void(const OrderedPermutation&)>& visit,
                                  std::uint64_t cap = kDefaultEnumerationCap);

std::vector<OrderedPermutation> enumerate_ordered_permutations(const OrderedGroups& groups,
                                                               std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace ads
