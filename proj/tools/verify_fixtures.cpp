#include "verify_fixtures.hpp"

#include "ads/exact.hpp"
#include "ads/knn_shapley.hpp"
#include "ads/knn_utility.hpp"
#include "ads/stateful.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ads::cli {
namespace {

constexpr double kTolerance = kExactResidualTolerance;

CheckResult within(std::string name, double residual, double tolerance = kTolerance, std::string note = {}) {
  return {std::move(name), residual <= tolerance, residual, std::move(note)};
}

double sup_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

double worst(const ValuationReport& r) {
  double w = r.efficiency_residual.value_or(0.0);
  for (double x : r.group_residuals) w = std::max(w, x);
  return w;
}

std::vector<double> random_table(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> table(std::size_t{1} << n);
  for (auto& v : table) v = unit(rng);
  table[0] = 0.0;
  return table;
}

OrderedGroups random_groups(std::size_t n, std::mt19937_64& rng) {
  const std::size_t T = 1 + rng() % std::min<std::size_t>(3, n);
  std::vector<std::size_t> order(n);
  for (std::size_t z = 0; z < n; ++z) order[z] = z;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<SourceIndex>> groups(T);
  for (std::size_t j = 0; j < n; ++j) groups[j < T ? j : rng() % T].push_back(order[j]);
  return OrderedGroups::from_indices(groups, n);
}

std::vector<CheckResult> toy() {
  TableUtility v(2, {0.0, 1.0, 1.0, 1.0});
  const auto ordered = OrderedGroups::from_indices({{0}, {1}}, 2);
  const auto perm = exact_ads_permutation(ordered, v);
  const auto subset = exact_ads_subset(ordered, v);
  const auto single = exact_ads_permutation(OrderedGroups::single_group(2), v);
  return {within("toy.ordered-values", sup_gap(perm.values, {1.0, 0.0})),
          within("toy.subset-values", sup_gap(subset.values, {1.0, 0.0})),
          within("toy.single-group-values", sup_gap(single.values, {0.5, 0.5})),
          within("toy.group-efficiency", std::max(worst(perm), worst(subset)))};
}

std::vector<CheckResult> random_games() {
  std::mt19937_64 rng(20240611);
  double gap = 0.0, residual = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + rng() % 5;
    TableUtility v(n, random_table(n, rng), 2.0);
    const auto groups = random_groups(n, rng);
    const auto perm = exact_ads_permutation(groups, v);
    const auto subset = exact_ads_subset(groups, v);
    gap = std::max(gap, sup_gap(perm.values, subset.values));
    residual = std::max({residual, worst(perm), worst(subset)});
  }
  return {within("random.subset-vs-permutation", gap, 1e-12), within("random.group-efficiency", residual)};
}

std::vector<CheckResult> ds_special() {
  std::mt19937_64 rng(7);
  double gap = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    TableUtility v(n, random_table(n, rng), 2.0);
    gap = std::max(gap, sup_gap(exact_ds(n, v).values, exact_ads_permutation(OrderedGroups::single_group(n), v).values));
  }
  return {within("ds-special.single-group-equals-ds", gap, 1e-12)};
}

std::vector<CheckResult> lemma1() {
  FeatureMatrix x(4, 1);
  x << -2.0, -0.5, 0.7, 2.2;
  FeatureMatrix q(4, 1);
  q << -1.8, -0.2, 1.0, 2.5;
  InstanceTable test({"t0", "t1", "t2", "t3"}, q, {0, 0, 1, 1});
  SourcePool pool(InstanceTable({"a", "b", "c", "d"}, x, {0, 1, 1, 1}),
                  {{"a", "owner", {0}}, {"b", "owner", {1}}, {"c", "owner", {2}}, {"d", "owner", {3}},
                   {"a-dup", "broker", {0}}, {"b-dup", "broker", {1}}, {"c-dup", "broker", {2}}, {"d-dup", "broker", {3}}});
  OneNnUtility v(pool, test);
  const std::vector<SourceIndex> originals{0, 1, 2, 3};
  const double gain = v.value(originals) - v.empty_value();
  const auto ds = exact_ds(8, v);
  double pair_gap = 0.0, orig = 0.0, dup = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    pair_gap = std::max(pair_gap, std::abs(ds.values[i] - ds.values[i + 4]));
    orig += ds.values[i];
    dup += ds.values[i + 4];
  }
  const auto ordered = exact_ads_subset(OrderedGroups::from_indices({{0, 1, 2, 3}, {4, 5, 6, 7}}, 8), v);
  double ads_orig = 0.0, ads_dup = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    ads_orig += ordered.values[i];
    ads_dup += ordered.values[i + 4];
  }
  return {within("lemma1.ds-pair-symmetry", pair_gap, 1e-12),
          within("lemma1.ds-originals-half", std::abs(orig - gain / 2), 1e-12),
          within("lemma1.ds-duplicates-half", std::abs(dup - gain / 2), 1e-12),
          within("lemma1.ads-originals-full", std::abs(ads_orig - gain), 1e-12),
          within("lemma1.ads-duplicates-zero", std::abs(ads_dup), 1e-12)};
}

std::vector<CheckResult> lemma2() {
  FeatureMatrix x = FeatureMatrix::Zero(3, 1);
  SourcePool pool(InstanceTable({"p1", "p2", "p3"}, x, {1, 1, 1}),
                  {{"z1", "c", {0}}, {"z2", "c", {1}}, {"z3", "c", {2}}});
  SignVoteUtility vote(pool);
  const auto r = within_round_values(OrderedGroups::from_indices({{0}, {1}, {2}}, 3), vote);
  auto show = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "value=%.17g", v);
    return std::string(buf);
  };
  return {within("lemma2.round1", std::abs(r.values[0] - 1.0), 0.0, show(r.values[0])),
          within("lemma2.round3", std::abs(r.values[2] - 0.0), 0.0, show(r.values[2])),
          within("lemma2.round-efficiency", worst(r))};
}

std::vector<CheckResult> knn_oracle() {
  std::mt19937_64 rng(99);
  double gap = 0.0, residual = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    FeatureMatrix x(static_cast<Eigen::Index>(n), 2);
    std::vector<int> y(n);
    std::vector<std::string> ids;
    std::vector<DataSource> sources;
    for (std::size_t i = 0; i < n; ++i) {
      x(static_cast<Eigen::Index>(i), 0) = static_cast<double>(rng() % 5);
      x(static_cast<Eigen::Index>(i), 1) = static_cast<double>(rng() % 3);
      y[i] = static_cast<int>(rng() % 2);
      ids.push_back("i" + std::to_string(i));
      sources.push_back({"s" + std::to_string(i), "c", {i}});
    }
    SourcePool pool(InstanceTable(ids, x, y), sources);
    FeatureMatrix q(1, 2);
    q << static_cast<double>(rng() % 5), static_cast<double>(rng() % 3);
    InstanceTable test({"q"}, q, {static_cast<int>(rng() % 2)});
    KnnConfig cfg;
    cfg.k = 1 + static_cast<int>(rng() % 3);
    cfg.normalization = KnnNormalization::kFixed;
    const auto groups = random_groups(n, rng);
    KnnUtility v(pool, test, cfg);
    const auto reference = exact_ads_subset(groups, v);
    const auto fast = knn_ads(groups, pool, test, cfg);
    gap = std::max(gap, sup_gap(reference.values, fast.values));
    residual = std::max(residual, worst(fast));
  }
  return {within("knn-oracle.recurrence-vs-subset", gap, 1e-12), within("knn-oracle.group-efficiency", residual, 1e-8)};
}

}  // namespace

const std::vector<std::pair<std::string, Fixture>>& fixtures() {
  static const std::vector<std::pair<std::string, Fixture>> all{
      {"toy", toy},       {"random", random_games}, {"ds-special", ds_special},
      {"lemma1", lemma1}, {"lemma2", lemma2},       {"knn-oracle", knn_oracle}};
  return all;
}

}  // namespace ads::cli
