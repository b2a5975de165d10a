#include "doctest.h"

#include "ads/error.hpp"
#include "ads/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace ads;

namespace {

ScenarioSpec small(const std::string& name) {
  ScenarioSpec spec;
  spec.scenario = name;
  spec.seed = 11;
  spec.sources = 3;
  spec.instances_per_source = 4;
  spec.test_size = 30;
  return spec;
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

TEST_CASE("replicated copies split the value under DS and earn nothing under ADS") {
  int informative = 0;
  for (int factor : {1, 2, 3}) {
    CAPTURE(factor);
    auto spec = small("replication");
    spec.factor = factor;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto r = run_replication_seed(spec, seed);
      if (r.gain == 0.0) continue;
      ++informative;
      CHECK(r.ds.grand() == doctest::Approx(r.gain).epsilon(1e-12));
      CHECK(r.ads.grand() == doctest::Approx(r.gain).epsilon(1e-12));
      CHECK(r.ds.contributor_share() == doctest::Approx(1.0 / factor).epsilon(1e-12));
      CHECK(r.ads.contributor_share() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(r.ads.broker) <= 1e-12);
    }
  }
  CHECK(informative >= 6);
}

TEST_CASE("replication market layout") {
  auto spec = small("replication");
  spec.factor = 3;
  const auto m = replication_market(spec, 5);
  CHECK(m.originals.size() == spec.sources);
  CHECK(m.derived.size() == 2 * spec.sources);
  CHECK(m.groups.group_count() == 2);
  for (auto z : m.derived) CHECK(m.pool.source(z).contributor == "broker");
  CHECK(m.pool.source(m.derived.front()).instances == m.pool.source(m.originals.front()).instances);
  CHECK(m.test.size() == spec.test_size);
}

TEST_CASE("augmentation leaves the contributors' total unchanged") {
  const auto spec = small("augmentation");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto out = run_augmentation_seed(spec, seed);
    REQUIRE(out.splits.size() == 4);
    const auto& before = out.splits[0];
    CHECK(out.splits[1].contributors == doctest::Approx(before.contributors).epsilon(1e-12));
    CHECK(out.splits[2].contributors == doctest::Approx(before.contributors).epsilon(1e-12));
    CHECK(out.splits[3].grand() == doctest::Approx(out.splits[2].grand()).epsilon(1e-12));
    CHECK(out.retained <= out.generated);
    CHECK(out.generated == spec.sources * spec.instances_per_source * static_cast<std::size_t>(spec.factor - 1));
  }
}

TEST_CASE("exact copies at one neighbor add nothing after the originals") {
  auto spec = small("augmentation");
  spec.jitter = 0.0;
  spec.aug_flip = 0.0;
  spec.k = 1;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto out = run_augmentation_seed(spec, seed);
    CHECK(std::abs(out.splits[1].broker) <= 1e-12);
    CHECK(out.retained == 0);
  }
}

TEST_CASE("intervention curves") {
  auto spec = small("intervention");
  const auto grid = fraction_grid(spec);
  REQUIRE(grid.size() == 7);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(0.30));
  CHECK(std::is_sorted(grid.begin(), grid.end()));

  const auto out = run_intervention_seed(spec, 3);
  CHECK(out.curves.size() == 6);
  for (const auto& [name, curve] : out.curves) {
    CAPTURE(name);
    REQUIRE(curve.size() == grid.size());
    CHECK(curve.front() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(out.curves.count("remove-highest") == 1);
  CHECK(out.curves.count("add-random") == 1);

  spec.fraction_max = 1.5;
  CHECK(code_of([&] { fraction_grid(spec); }) == ErrorCode::kFractionOutOfRange);
  spec.fraction_max = 0.3;
  spec.fraction_step = 0.0;
  CHECK(code_of([&] { run_scenario(spec); }) == ErrorCode::kFractionOutOfRange);
}

TEST_CASE("scenario validation") {
  auto spec = small("replication");
  spec.scenario = "nope";
  CHECK(code_of([&] { validate(spec); }) == ErrorCode::kInvalidScenario);
  spec = small("replication");
  spec.factor = 0;
  CHECK(code_of([&] { validate(spec); }) == ErrorCode::kInvalidScenario);
  spec = small("sequential-noisy");
  spec.flip = 1.5;
  CHECK(code_of([&] { validate(spec); }) == ErrorCode::kInvalidScenario);
  spec = small("replication");
  spec.seeds = 0;
  CHECK(code_of([&] { validate(spec); }) == ErrorCode::kInvalidScenario);
}

TEST_CASE("detection statistics") {
  const auto rounds = OrderedGroups::from_indices({{0, 1, 2}, {3, 4}}, 5);
  const std::vector<bool> noisy{true, false, false, false, true};
  CHECK(detection_auc({-1.0, 0.5, 0.2, 0.3, 0.1}, noisy, rounds) == doctest::Approx(1.0));
  CHECK(detection_auc({1.0, 0.5, 0.2, 0.0, 0.1}, noisy, rounds) == doctest::Approx(0.0));
  CHECK(detection_auc({0.0, 0.0, 0.0, 0.0, 0.0}, noisy, rounds) == doctest::Approx(0.5));
  const auto curve = detection_curve({-1.0, 0.5, 0.2, 0.3, 0.1}, noisy);
  REQUIRE(curve.size() == 5);
  CHECK(curve[0] == doctest::Approx(0.5));
  CHECK(curve[1] == doctest::Approx(1.0));
  CHECK(curve[4] == doctest::Approx(1.0));
}

TEST_CASE("sequential rounds keep within-round efficiency") {
  const auto spec = small("sequential-noisy");
  const auto out = run_sequential_seed(spec, 8);
  REQUIRE(out.round_residuals.size() == spec.rounds);
  for (double r : out.round_residuals) CHECK(r <= 1e-10);
  CHECK(out.values.at("ads").size() == spec.rounds * spec.per_round);
  for (const auto& [method, auc] : out.auc) {
    CHECK(auc >= 0.0);
    CHECK(auc <= 1.0);
  }
  CHECK(out.topk.count("ads@3") == 1);
  CHECK(out.topk.at("ads@3").size() == spec.rounds);

  const auto again = run_sequential_seed(spec, 8);
  CHECK(again.values == out.values);
}

TEST_CASE("clean contributors cannot be told apart") {
  auto spec = small("sequential-noisy");
  spec.flip = 0.0;
  spec.seeds = 12;
  const auto result = run_scenario(spec);
  CHECK(std::abs(result.summary.at("auc_ads") - 0.5) <= result.summary.at("auc_ads_ci") + 0.05);
}

TEST_CASE("label flippers are valued lower") {
  auto spec = small("sequential-noisy");
  spec.seeds = 12;
  const auto result = run_scenario(spec);
  CHECK(result.summary.at("auc_ads") - result.summary.at("auc_ads_ci") > 0.5);
  CHECK(result.summary.at("round_residual_max") <= 1e-10);
}

TEST_CASE("multi-seed runs are reproducible and thread independent") {
  auto spec = small("replication");
  spec.seeds = 3;
  CHECK(run_seed(spec, 2) == spec.seed + 2);
  const auto a = run_scenario(spec);
  setenv("ADS_THREADS", "4", 1);
  const auto b = run_scenario(spec);
  unsetenv("ADS_THREADS");
  CHECK(a.summary == b.summary);
  CHECK(a.summary.at("ads_contributor_share") == doctest::Approx(1.0));
  CHECK(a.summary.at("ds_contributor_share") == doctest::Approx(0.5));
}
