#include "ads/permutation.hpp"

#include "ads/error.hpp"

#include <algorithm>

namespace ads {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8bb84b93962eacc9ULL))) {}

std::uint64_t CounterRng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 product = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

OrderedPermutation sample_ordered_permutation(const OrderedGroups& groups, std::uint64_t seed,
                                              std::uint64_t draw_index) {
  CounterRng rng(seed, draw_index);
  OrderedPermutation order;
  order.reserve(groups.source_count());
  for (const auto& g : groups.groups()) {
    const auto begin = order.size();
    order.insert(order.end(), g.begin(), g.end());
    for (std::size_t k = g.size(); k > 1; --k) {
      const auto j = static_cast<std::size_t>(rng.below(k));
      std::swap(order[begin + k - 1], order[begin + j]);
    }
  }
  return order;
}

bool respects_groups(const OrderedGroups& groups, const OrderedPermutation& order) {
  if (order.size() != groups.source_count()) return false;
  std::vector<char> seen(order.size(), 0);
  std::size_t last = 0;
  for (auto z : order) {
    if (z >= order.size() || seen[z]) return false;
    seen[z] = 1;
    const auto t = groups.group_number(z);
    if (t < last) return false;
    last = t;
  }
  return true;
}

void for_each_ordered_permutation(const OrderedGroups& groups,
                                  const std::function<void(const OrderedPermutation&)>& visit,
                                  std::uint64_t cap) {
  const auto count = groups.ordered_permutation_count();
  if (count > cap) {
    throw Error(ErrorCode::kEnumerationTooLarge,
                std::to_string(count) + " ordered permutations exceed cap " + std::to_string(cap));
  }
  const std::size_t T = groups.group_count();
  std::vector<std::vector<SourceIndex>> arrangement = groups.groups();  // each starts sorted
  OrderedPermutation order;
  order.reserve(groups.source_count());
  while (true) {
    order.clear();
    for (const auto& g : arrangement) order.insert(order.end(), g.begin(), g.end());
    visit(order);
    // Odometer over groups, last group varies fastest.
    std::size_t t = T;
    while (t > 0) {
      --t;
      if (std::next_permutation(arrangement[t].begin(), arrangement[t].end())) break;
      if (t == 0) return;
    }
    if (T == 0) return;
  }
}

std::vector<OrderedPermutation> enumerate_ordered_permutations(const OrderedGroups& groups,
                                                               std::uint64_t cap) {
  std::vector<OrderedPermutation> out;
  for_each_ordered_permutation(groups, [&](const OrderedPermutation& p) { out.push_back(p); }, cap);
  return out;
}

}  // namespace ads
