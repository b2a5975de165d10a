#include "doctest.h"

#include "ads/error.hpp"
#include "ads/groups.hpp"
#include "ads/permutation.hpp"

#include <map>
#include <set>

using namespace ads;

namespace {

SourcePool letters(std::size_t n) {
  FeatureMatrix x = FeatureMatrix::Zero(static_cast<Eigen::Index>(n), 1);
  std::vector<std::string> ids;
  std::vector<DataSource> sources;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string name(1, static_cast<char>('a' + i));
    ids.push_back("x" + name);
    sources.push_back({name, "owner", {i}});
  }
  return SourcePool(InstanceTable(ids, x, std::vector<int>(n, 0)), sources);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kParseError;
}

}  // namespace

TEST_CASE("group validation") {
  const auto pool = letters(2);
  const auto ok = validate_groups({{"a"}, {"b"}}, pool);
  CHECK(ok.group_count() == 2);
  CHECK(ok.group_number(0) == 1);
  CHECK(ok.group_number(1) == 2);

  try {
    validate_groups({{"a"}, {"a", "b"}}, pool);
    FAIL("overlap accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOverlappingGroups);
    CHECK(e.detail() == "a");
  }
  try {
    validate_groups({{"a"}, {}}, pool);
    FAIL("empty group accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyGroup);
    CHECK(std::string(e.detail()).find('2') != std::string::npos);
  }
  CHECK(code_of([&] { validate_groups({{"a"}}, pool); }) == ErrorCode::kUncoveredSource);
  CHECK(code_of([&] { validate_groups({{"a", "b", "zz"}}, pool); }) == ErrorCode::kUnknownSource);
}

TEST_CASE("group prefix") {
  const auto three = OrderedGroups::from_indices({{0}, {1}, {2}}, 3);
  CHECK(group_prefix(three, 1).empty());
  CHECK(group_prefix(three, 3) == std::vector<SourceIndex>{0, 1});
  const auto two = OrderedGroups::from_indices({{0, 1}, {2}}, 3);
  CHECK(group_prefix(two, 2) == std::vector<SourceIndex>{0, 1});
  CHECK(code_of([&] { group_prefix(two, 0); }) == ErrorCode::kIndexOutOfRange);
  CHECK(code_of([&] { group_prefix(two, 3); }) == ErrorCode::kIndexOutOfRange);
}

TEST_CASE("enumeration counts and order") {
  const auto ab_c = OrderedGroups::from_indices({{0, 1}, {2}}, 3);
  const auto perms = enumerate_ordered_permutations(ab_c);
  REQUIRE(perms.size() == 2);
  CHECK(perms[0] == OrderedPermutation{0, 1, 2});
  CHECK(perms[1] == OrderedPermutation{1, 0, 2});

  CHECK(enumerate_ordered_permutations(OrderedGroups::from_indices({{0}, {1}, {2}}, 3)).size() == 1);
  CHECK(enumerate_ordered_permutations(OrderedGroups::from_indices({{0, 1}, {2, 3}}, 4)).size() == 4);

  const auto mixed = OrderedGroups::from_indices({{0, 3, 5}, {1}, {2, 4, 6, 7}}, 8);
  const auto all = enumerate_ordered_permutations(mixed);
  CHECK(all.size() == mixed.ordered_permutation_count());
  CHECK(all.size() == 6 * 24);
  std::set<OrderedPermutation> distinct(all.begin(), all.end());
  CHECK(distinct.size() == all.size());
  for (const auto& p : all) CHECK(respects_groups(mixed, p));

  CHECK(code_of([] { enumerate_ordered_permutations(OrderedGroups::single_group(10)); }) ==
        ErrorCode::kEnumerationTooLarge);
  CHECK(enumerate_ordered_permutations(OrderedGroups::single_group(4), 24).size() == 24);
}

TEST_CASE("sampled permutations respect the groups") {
  const auto a_bc = OrderedGroups::from_indices({{0}, {1, 2}}, 3);
  std::map<OrderedPermutation, int> seen;
  for (std::uint64_t d = 0; d < 2000; ++d) ++seen[sample_ordered_permutation(a_bc, 7, d)];
  REQUIRE(seen.size() == 2);
  CHECK(seen.count({0, 1, 2}) == 1);
  CHECK(seen.count({0, 2, 1}) == 1);
  CHECK(std::abs(seen[{0, 1, 2}] - 1000) < 150);

  const auto groups = OrderedGroups::from_indices({{4, 0}, {2}, {1, 3, 5}}, 6);
  for (std::uint64_t d = 0; d < 500; ++d) CHECK(respects_groups(groups, sample_ordered_permutation(groups, 3, d)));
}

TEST_CASE("single-group sampling passes a chi-square uniformity test") {
  const auto one = OrderedGroups::single_group(3);
  std::map<OrderedPermutation, int> counts;
  const int draws = 6000;
  for (std::uint64_t d = 0; d < draws; ++d) ++counts[sample_ordered_permutation(one, 12345, d)];
  REQUIRE(counts.size() == 6);
  double chi2 = 0.0;
  for (const auto& [perm, c] : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  CHECK(chi2 < 15.086);  // df = 5, alpha = 0.01

  const auto four = OrderedGroups::single_group(4);
  std::map<OrderedPermutation, int> c4;
  for (std::uint64_t d = 0; d < 24000; ++d) ++c4[sample_ordered_permutation(four, 99, d)];
  REQUIRE(c4.size() == 24);
  double chi4 = 0.0;
  for (const auto& [perm, c] : c4) chi4 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  CHECK(chi4 < 41.638);  // df = 23, alpha = 0.01
}

TEST_CASE("sampling is deterministic in seed and draw index") {
  const auto g = OrderedGroups::from_indices({{0, 1, 2, 3}, {4, 5, 6}}, 7);
  CHECK(sample_ordered_permutation(g, 42) == sample_ordered_permutation(g, 42));
  CHECK(sample_ordered_permutation(g, 42, 17) == sample_ordered_permutation(g, 42, 17));
  int differing = 0;
  for (std::uint64_t d = 0; d < 20; ++d) {
    differing += sample_ordered_permutation(g, 42, d) != sample_ordered_permutation(g, 43, d);
  }
  CHECK(differing > 10);
}

TEST_CASE("counter rng bounds") {
  CounterRng rng(1, 2);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.below(7) < 7);
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
