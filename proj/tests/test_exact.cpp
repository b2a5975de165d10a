#include "doctest.h"

#include "ads/error.hpp"
#include "ads/exact.hpp"
#include "ads/knn_utility.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <random>

using namespace ads;

namespace {

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

TableUtility two_player_toy() { return TableUtility(2, {0.0, 1.0, 1.0, 1.0}); }

/// Originals with random 2-d points, and a duplicate source per original
/// that references the very same instance.
struct Duplication {
  SourcePool pool;
  InstanceTable test;
  std::size_t originals;
};

Duplication duplication_game(std::size_t originals, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(originals);
  FeatureMatrix x(n, 2);
  std::vector<int> y(originals);
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
    x(i, 0) = noise(rng) + 1.2 * (i % 2);
    x(i, 1) = noise(rng);
    ids.push_back("x" + std::to_string(i));
  }
  std::vector<DataSource> sources;
  for (std::size_t i = 0; i < originals; ++i) sources.push_back({"orig" + std::to_string(i), "owner", {i}});
  for (std::size_t i = 0; i < originals; ++i) sources.push_back({"dup" + std::to_string(i), "broker", {i}});
  FeatureMatrix q(8, 2);
  std::vector<int> qy(8);
  for (Eigen::Index i = 0; i < 8; ++i) {
    qy[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
    q(i, 0) = noise(rng) + 1.2 * (i % 2);
    q(i, 1) = noise(rng);
  }
  return {SourcePool(InstanceTable(ids, x, y), sources), fixture::table_of(q, qy), originals};
}

std::vector<SourceIndex> range(std::size_t from, std::size_t to) {
  std::vector<SourceIndex> out;
  for (auto z = from; z < to; ++z) out.push_back(z);
  return out;
}

}  // namespace

TEST_CASE("toy games") {
  const auto v = two_player_toy();
  const auto ordered = OrderedGroups::from_indices({{0}, {1}}, 2);
  const auto perm = exact_ads_permutation(ordered, v);
  CHECK(perm.values == std::vector<double>{1.0, 0.0});
  CHECK(perm.group_residuals[1] == 0.0);
  CHECK(exact_ads_subset(ordered, v).values == std::vector<double>{1.0, 0.0});

  const auto single = OrderedGroups::single_group(2);
  CHECK(exact_ads_permutation(single, v).values == std::vector<double>{0.5, 0.5});
  CHECK(exact_ds(2, v).values == std::vector<double>{0.5, 0.5});
}

TEST_CASE("additive game values every source by its size under any ordering") {
  FeatureMatrix x = FeatureMatrix::Zero(6, 1);
  SourcePool pool(InstanceTable({"a", "b", "c", "d", "e", "f"}, x, std::vector<int>(6, 0)),
                  {{"s1", "c", {0}}, {"s2", "c", {1, 2}}, {"s3", "c", {3, 4, 5}}, {"s4", "c", {0, 0}}});
  AdditiveUtility v(pool);
  for (const auto& groups : {OrderedGroups::single_group(4), OrderedGroups::from_indices({{2}, {0, 3}, {1}}, 4),
                             OrderedGroups::from_indices({{1, 3}, {0, 2}}, 4)}) {
    const auto r = exact_ads_permutation(groups, v);
    CHECK(max_gap(r.values, {1, 2, 3, 2}) < 1e-12);
    CHECK(max_gap(exact_ads_subset(groups, v).values, {1, 2, 3, 2}) < 1e-12);
  }
}

TEST_CASE("subset form equals permutation enumeration on random games") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  double worst_oracle = 0.0;
  double worst_residual = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    const std::size_t T = 1 + rng() % std::min<std::size_t>(3, n);
    std::vector<double> table(std::size_t{1} << n);
    for (auto& e : table) e = unit(rng);
    const auto group_of = oracle::random_groups(n, T, rng);
    const auto groups = oracle::groups_from(group_of);
    TableUtility v(n, table, 2.0);
    const auto perm = exact_ads_permutation(groups, v);
    const auto subset = exact_ads_subset(groups, v);
    worst = std::max(worst, max_gap(perm.values, subset.values));
    const auto reference =
        oracle::permutation_ads(n, group_of, [&](oracle::Mask m) { return table[m]; });
    worst_oracle = std::max(worst_oracle, max_gap(subset.values, reference));
    for (const auto* r : {&perm, &subset}) {
      for (double res : r->group_residuals) worst_residual = std::max(worst_residual, res);
      worst_residual = std::max(worst_residual, *r->efficiency_residual);
    }
  }
  CHECK(worst <= 1e-12);
  CHECK(worst_oracle <= 1e-12);
  CHECK(worst_residual <= 1e-12);
}

TEST_CASE("single-group ADS is Data Shapley") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    TableUtility v(n, oracle::random_monotone_game(n, rng));
    const auto ds = exact_ds(n, v);
    const auto ads_one = exact_ads_permutation(OrderedGroups::single_group(n), v);
    CHECK(max_gap(ds.values, ads_one.values) <= 1e-12);
    CHECK(ds.method == "ds");
    CHECK(verify_efficiency(ds, v) <= 1e-12);
  }
}

TEST_CASE("first group and singleton groups") {
  std::mt19937_64 rng(3);
  const std::size_t n = 6;
  const auto table = oracle::random_monotone_game(n, rng);
  TableUtility v(n, table);
  const auto groups = OrderedGroups::from_indices({{0, 1, 2}, {3}, {4, 5}}, n);
  const auto r = exact_ads_subset(groups, v);

  // t = 1: Data Shapley of the restriction to D_1.
  TableUtility first(3, std::vector<double>(table.begin(), table.begin() + 8));
  const auto restricted = exact_ds(3, first);
  for (std::size_t z = 0; z < 3; ++z) CHECK(r.values[z] == doctest::Approx(restricted.values[z]).epsilon(1e-12));

  // Singleton group: the one marginal after the prefix.
  CHECK(r.values[3] == doctest::Approx(table[0b1111] - table[0b0111]).epsilon(1e-12));
  CHECK(r.group_residuals[0] <= 1e-12);
}

TEST_CASE("symmetry, nullity and affine ranking invariance") {
  FeatureMatrix x(4, 1);
  x << 0.0, 1.0, 3.0, 7.0;
  SourcePool pool(InstanceTable({"a", "b", "c", "d"}, x, {1, 0, 1, 0}),
                  {{"p", "c", {0, 1}}, {"q", "c", {0, 1}}, {"r", "c", {2}}, {"s", "c", {3}}, {"u", "c", {2, 3}}});
  FeatureMatrix qx(3, 1);
  qx << 0.2, 2.5, 6.0;
  const auto test = fixture::table_of(qx, {1, 1, 0});
  KnnConfig cfg;
  cfg.k = 2;
  KnnUtility v(pool, test, cfg);
  const auto groups = OrderedGroups::from_indices({{2, 3}, {0, 1, 4}}, 5);
  const auto r = exact_ads_permutation(groups, v);
  CHECK(r.values[0] == doctest::Approx(r.values[1]).epsilon(1e-14));

  FunctionUtility constant([](Coalition) { return 0.7; }, 1.0, "const");
  const auto zero = exact_ads_subset(groups, constant);
  for (double val : zero.values) CHECK(val == 0.0);
  CHECK(*zero.efficiency_residual == 0.0);

  AffineUtility scaled(v, 3.5, -2.0);
  const auto s = exact_ads_permutation(groups, scaled);
  auto order = [](const std::vector<double>& vals) {
    std::vector<std::size_t> idx(vals.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return vals[a] > vals[b] + 1e-12; });
    return idx;
  };
  CHECK(order(r.values) == order(s.values));
}

TEST_CASE("duplication game") {
  const auto game = duplication_game(4, 17);
  OneNnUtility v(game.pool, game.test);
  const auto all = range(0, 8);
  const auto orig = range(0, 4);
  CHECK(v.value(all) == v.value(orig));
  const double gain = v.value(orig) - v.empty_value();

  const auto ds = exact_ds(8, v);
  double orig_total = 0.0, dup_total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(ds.values[i] - ds.values[i + 4]) <= 1e-12);
    orig_total += ds.values[i];
    dup_total += ds.values[i + 4];
  }
  CHECK(std::abs(orig_total - gain / 2) <= 1e-12);
  CHECK(std::abs(dup_total - gain / 2) <= 1e-12);

  const auto ordered = exact_ads_subset(OrderedGroups::from_indices({orig, range(4, 8)}, 8), v);
  double ads_orig = 0.0, ads_dup = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    ads_orig += ordered.values[i];
    ads_dup += ordered.values[i + 4];
    CHECK(ordered.values[i + 4] == 0.0);  // the later member of each dependent pair
  }
  CHECK(std::abs(ads_orig - gain) <= 1e-12);
  CHECK(std::abs(ads_dup) <= 1e-12);
}

TEST_CASE("within-round values on the sign-vote trajectory") {
  FeatureMatrix x = FeatureMatrix::Zero(3, 1);
  SourcePool pool(InstanceTable({"p1", "p2", "p3"}, x, {1, 1, 1}),
                  {{"z1", "c", {0}}, {"z2", "c", {1}}, {"z3", "c", {2}}});
  SignVoteUtility vote(pool);
  const auto rounds = OrderedGroups::from_indices({{0}, {1}, {2}}, 3);
  const auto r = within_round_values(rounds, vote);
  CHECK(r.values[0] == 1.0);
  CHECK(r.values[1] == 0.0);
  CHECK(r.values[2] == 0.0);
  for (double res : r.group_residuals) CHECK(res <= 1e-12);

  const auto states = realized_trajectory(rounds, vote);
  REQUIRE(states.size() == 4);
  CHECK(states[2].count_of(1) == 2.0);
  CHECK(within_round_loo(rounds, vote).values == r.values);
}

TEST_CASE("within-round values reduce to Data Shapley for one round") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> noise(0.0, 1.0);
  FeatureMatrix x(6, 2);
  std::vector<int> y(6);
  for (Eigen::Index i = 0; i < 6; ++i) {
    y[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
    x(i, 0) = noise(rng) + (i % 2);
    x(i, 1) = noise(rng);
  }
  const auto pool = fixture::singleton_pool(x, y);
  FeatureMatrix q(10, 2);
  std::vector<int> qy(10);
  for (Eigen::Index i = 0; i < 10; ++i) {
    qy[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
    q(i, 0) = noise(rng) + (i % 2);
    q(i, 1) = noise(rng);
  }
  const auto test = fixture::table_of(q, qy);
  const auto learner = prototype_utility(pool, test);
  const auto one_round = within_round_values(OrderedGroups::single_group(6), learner);
  AnchoredUtility plain(learner, learner.initial_state());
  CHECK(max_gap(one_round.values, exact_ds(6, plain).values) <= 1e-12);

  // Singleton rounds: each value is the single state-conditioned marginal.
  const auto singles = OrderedGroups::from_indices({{0}, {1}, {2}, {3}, {4}, {5}}, 6);
  const auto states = realized_trajectory(singles, learner);
  const auto seq = within_round_values(singles, learner);
  for (std::size_t t = 0; t < 6; ++t) {
    CHECK(seq.values[t] == doctest::Approx(state_marginal_contribution(learner, states[t], t, {})).epsilon(1e-14));
  }
}

TEST_CASE("efficiency checks flag a tampered report") {
  std::mt19937_64 rng(5);
  TableUtility v(5, oracle::random_monotone_game(5, rng));
  const auto groups = OrderedGroups::from_indices({{0, 1}, {2, 3, 4}}, 5);
  auto r = exact_ads_subset(groups, v);
  for (double res : verify_group_efficiency(r, groups, v)) CHECK(res <= 1e-12);
  r.values[3] += 0.01;
  const auto res = verify_group_efficiency(r, groups, v);
  CHECK(res[0] <= 1e-12);
  CHECK(res[1] == doctest::Approx(0.01));
  CHECK(verify_efficiency(r, v) == doctest::Approx(0.01));
}

TEST_CASE("enumeration caps") {
  FunctionUtility size([](Coalition s) { return static_cast<double>(s.size()); }, 1.0, "size");
  CHECK_THROWS_AS(exact_ads_permutation(OrderedGroups::single_group(11), size), Error);
  try {
    exact_ads_subset(OrderedGroups::single_group(22), size);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEnumerationTooLarge);
  }
  CHECK(exact_ads_subset(OrderedGroups::single_group(12), size).values[0] == doctest::Approx(1.0));
}
