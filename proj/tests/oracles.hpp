#pragma once

// Brute-force reference implementations used only by tests. They share no
// code with the engines beyond the input types.

#include "ads/dataset.hpp"
#include "ads/groups.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using Mask = std::uint32_t;
using Game = std::function<double(Mask)>;

inline Mask mask_of(const std::vector<std::size_t>& members) {
  Mask m = 0;
  for (auto z : members) m |= Mask{1} << z;
  return m;
}

/// Mean marginal over every permutation of {0..n-1} whose group indices never
/// decrease, found by filtering all n! orderings.
inline std::vector<double> permutation_ads(std::size_t n, const std::vector<std::size_t>& group_of, const Game& v) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<long double> sum(n, 0.0L);
  std::size_t admitted = 0;
  do {
    bool ok = true;
    for (std::size_t p = 1; p < n && ok; ++p) ok = group_of[order[p - 1]] <= group_of[order[p]];
    if (!ok) continue;
    ++admitted;
    Mask prefix = 0;
    double before = v(prefix);
    for (auto z : order) {
      prefix |= Mask{1} << z;
      const double after = v(prefix);
      sum[z] += after - before;
      before = after;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  std::vector<double> out(n);
  for (std::size_t z = 0; z < n; ++z) out[z] = static_cast<double>(sum[z] / admitted);
  return out;
}

inline double choose(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t j = 1; j <= k; ++j) r = r * static_cast<double>(n - k + j) / static_cast<double>(j);
  return r;
}

/// Within-group subset form evaluated by scanning all masks of the group.
inline std::vector<double> subset_ads(std::size_t n, const std::vector<std::size_t>& group_of, const Game& v) {
  std::vector<double> out(n, 0.0);
  for (std::size_t z = 0; z < n; ++z) {
    Mask before = 0;
    std::vector<std::size_t> others;
    for (std::size_t w = 0; w < n; ++w) {
      if (group_of[w] < group_of[z]) before |= Mask{1} << w;
      if (group_of[w] == group_of[z] && w != z) others.push_back(w);
    }
    const std::size_t g = others.size() + 1;
    long double acc = 0.0L;
    for (Mask bits = 0; bits < (Mask{1} << others.size()); ++bits) {
      Mask s = before;
      std::size_t size = 0;
      for (std::size_t j = 0; j < others.size(); ++j) {
        if (bits >> j & 1) {
          s |= Mask{1} << others[j];
          ++size;
        }
      }
      acc += (v(s | Mask{1} << z) - v(s)) / choose(g - 1, size);
    }
    out[z] = static_cast<double>(acc / g);
  }
  return out;
}

/// Table game with v(empty) = 0 and v(S) = max over subsets of S of a random
/// weight in [0, 1]: monotone, so every marginal lies in [0, 1].
inline std::vector<double> random_monotone_game(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> table(std::size_t{1} << n, 0.0);
  for (Mask s = 1; s < table.size(); ++s) {
    double best = unit(rng);
    for (std::size_t j = 0; j < n; ++j) {
      if (s >> j & 1) best = std::max(best, table[s & ~(Mask{1} << j)]);
    }
    table[s] = best;
  }
  return table;
}

/// Random group assignment of n sources into T non-empty groups.
inline std::vector<std::size_t> random_groups(std::size_t n, std::size_t groups, std::mt19937_64& rng) {
  std::vector<std::size_t> group_of(n);
  for (std::size_t z = 0; z < n; ++z) group_of[z] = z < groups ? z : rng() % groups;
  std::shuffle(group_of.begin(), group_of.end(), rng);
  return group_of;
}

inline ads::OrderedGroups groups_from(const std::vector<std::size_t>& group_of) {
  const std::size_t T = *std::max_element(group_of.begin(), group_of.end()) + 1;
  std::vector<std::vector<ads::SourceIndex>> groups(T);
  for (std::size_t z = 0; z < group_of.size(); ++z) groups[group_of[z]].push_back(z);
  return ads::OrderedGroups::from_indices(groups, group_of.size());
}

/// KNN vote with denominator K over the given occurrences: plain loops,
/// ranking by (squared distance, instance id, occurrence ordinal). Missing
/// neighbors count as non-matches.
struct Neighbor {
  double distance;
  std::string id;
  std::size_t ordinal;
  int label;
};

inline double knn_fixed_vote(std::vector<Neighbor> pool, int y_test, int k) {
  std::sort(pool.begin(), pool.end(), [](const Neighbor& a, const Neighbor& b) {
    return std::tie(a.distance, a.id, a.ordinal) < std::tie(b.distance, b.id, b.ordinal);
  });
  int hits = 0;
  for (std::size_t j = 0; j < pool.size() && j < static_cast<std::size_t>(k); ++j) hits += pool[j].label == y_test;
  return static_cast<double>(hits) / k;
}

inline std::vector<Neighbor> neighbors_of(const ads::InstanceTable& table, const std::vector<std::size_t>& rows,
                                          const ads::Instance& test) {
  std::vector<Neighbor> out;
  for (std::size_t o = 0; o < rows.size(); ++o) {
    double d = 0.0;
    for (Eigen::Index c = 0; c < table.dim(); ++c) {
      const double diff = table.features()(static_cast<Eigen::Index>(rows[o]), c) - test.features[c];
      d += diff * diff;
    }
    out.push_back({d, table.ids()[rows[o]], o, table.label(rows[o])});
  }
  return out;
}

/// Instance-level KNN game for one test point: player o is occurrence o of
/// `rows` (ordinal order is the tie-break of last resort).
inline Game knn_instance_game(const ads::InstanceTable& table, const std::vector<std::size_t>& rows,
                              const ads::Instance& test, int k) {
  auto all = neighbors_of(table, rows, test);
  return [all, y = test.label, k](Mask s) {
    std::vector<Neighbor> chosen;
    for (std::size_t o = 0; o < all.size(); ++o) {
      if (s >> o & 1) chosen.push_back(all[o]);
    }
    return knn_fixed_vote(std::move(chosen), y, k);
  };
}

}  // namespace oracle
